#pragma once

// Small dense nonnegative least-squares utilities used by the constrained
// evolution steps. Dimensions here are tiny (rows = scheduled nodes + 1,
// cols = bit-pattern groups), so exact active-set methods are used for
// deterministic, finite termination.

#include <Eigen/Dense>

namespace qreduct::lsq {

// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// min ||x - c||_2 subject to A x = y, x >= 0. `start` must already satisfy
// both constraint sets; the minimizer is the (unique) Euclidean projection
// of c onto that face. Used to pick, among all least-squares-optimal mass
// vectors, the one closest to the previous step.
Eigen::VectorXd project_to_face(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& c, Eigen::VectorXd start);

}  // namespace qreduct::lsq
