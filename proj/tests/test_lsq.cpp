#include "qreduct/lsq.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace {

double urand(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Eigen::MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = 2.0 * urand(rng) - 1.0;
  return a;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  return sub;
}

// Smallest residual over every support: unconstrained least squares on each
// column subset, kept only when the minimizer is itself nonnegative. The
// optimum of the sign-constrained problem is attained on one such subset.
double brute_force_nnls_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  double best = b.norm();  // empty support
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    const Eigen::MatrixXd sub = columns(a, idx);
    const Eigen::VectorXd xs = sub.completeOrthogonalDecomposition().solve(b);
    if ((xs.array() < -1e-10).any()) continue;
    best = std::min(best, (sub * xs - b).norm());
  }
  return best;
}

// Equality-constrained projection of c onto {x : a x = y, x_Z = 0} for every
// zero set Z, keeping nonnegative consistent solutions; the closest one is
// the projection onto the nonnegative face polytope.
Eigen::VectorXd brute_force_face(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& c) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd winner = Eigen::VectorXd::Zero(n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> free_idx;
    for (int j = 0; j < n; ++j)
      if (!(mask & (1 << j))) free_idx.push_back(j);
    const int f = static_cast<int>(free_idx.size());
    // KKT system of min ||x_F - c_F||^2 subject to A_F x_F = y.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(f + m, f + m);
    kkt.topLeftCorner(f, f).setIdentity();
    const Eigen::MatrixXd af = columns(a, free_idx);
    kkt.topRightCorner(f, m) = af.transpose();
    kkt.bottomLeftCorner(m, f) = af;
    Eigen::VectorXd rhs(f + m);
    for (int k = 0; k < f; ++k) rhs(k) = c(free_idx[k]);
    rhs.tail(m) = y;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < f; ++k) x(free_idx[k]) = sol(k);
    if ((a * x - y).norm() > 1e-8) continue;   // subset cannot meet the constraints
    if ((x.array() < -1e-9).any()) continue;   // leaves the nonnegative cone
    const double obj = (x - c).norm();
    if (obj < best) {
      best = obj;
      winner = x;
    }
  }
  return winner;
}

}  // namespace

TEST_CASE("nonnegative least squares: pinned small cases") {
  SUBCASE("negative coordinates clamp to zero") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd b(2);
    b << 3.0, -2.0;
    const Eigen::VectorXd x = qreduct::lsq::nnls(a, b);
    CHECK(std::abs(x(0) - 3.0) < 1e-12);
    CHECK(std::abs(x(1)) < 1e-12);
  }
  SUBCASE("a fully negative fit returns the origin") {
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 1.0;
    Eigen::VectorXd b(2);
    b << 1.0, -3.0;
    const Eigen::VectorXd x = qreduct::lsq::nnls(a, b);
    CHECK(std::abs(x(0)) < 1e-12);
  }
  SUBCASE("consistent nonnegative systems are solved exactly") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 50; ++it) {
      const int m = 2 + static_cast<int>(rng() % 3);
      const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(m));
      const Eigen::MatrixXd a = random_matrix(rng, m, n);
      Eigen::VectorXd x0(n);
      for (int j = 0; j < n; ++j) x0(j) = 0.1 + urand(rng);
      const Eigen::VectorXd x = qreduct::lsq::nnls(a, a * x0);
      CHECK((a * x - a * x0).norm() < 1e-10);
    }
  }
}

TEST_CASE("nonnegative least squares matches support enumeration and satisfies KKT") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    CAPTURE(it);
    const int m = 1 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 6);
    const Eigen::MatrixXd a = random_matrix(rng, m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) b(i) = 2.0 * urand(rng) - 1.0;

    const Eigen::VectorXd x = qreduct::lsq::nnls(a, b);
    REQUIRE(x.size() == n);
    CHECK((x.array() >= -1e-12).all());
    const double res = (a * x - b).norm();
    CHECK(std::abs(res - brute_force_nnls_residual(a, b)) < 1e-9);

    // First-order optimality: active coordinates cannot improve by growing,
    // inactive ones have vanishing gradient.
    const Eigen::VectorXd grad = a.transpose() * (a * x - b);
    for (int j = 0; j < n; ++j) {
      if (x(j) > 1e-8)
        CHECK(std::abs(grad(j)) < 1e-8);
      else
        CHECK(grad(j) > -1e-8);
    }
  }
}

TEST_CASE("projection onto the optimal face: pinned small case") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 1.0;
  Eigen::VectorXd y(1), c(2), start(2);
  y << 1.0;
  c << 10.0, 0.0;
  start << 0.5, 0.5;
  const Eigen::VectorXd x = qreduct::lsq::project_to_face(a, y, c, start);
  // The unconstrained projection of (10, 0) onto x1 + x2 = 1 leaves the
  // cone, so the answer is the vertex (1, 0).
  CHECK(std::abs(x(0) - 1.0) < 1e-10);
  CHECK(std::abs(x(1)) < 1e-10);
}

TEST_CASE("projection onto the optimal face matches zero-set enumeration") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 100; ++it) {
    CAPTURE(it);
    const int m = 1 + static_cast<int>(rng() % 3);
    const int n = m + static_cast<int>(rng() % 3);
    const Eigen::MatrixXd a = random_matrix(rng, m, n);
    Eigen::VectorXd x0(n), c(n);
    for (int j = 0; j < n; ++j) {
      x0(j) = 0.1 + urand(rng);
      c(j) = 2.0 * urand(rng) - 1.0;
    }
    const Eigen::VectorXd y = a * x0;

    const Eigen::VectorXd x = qreduct::lsq::project_to_face(a, y, c, x0);
    REQUIRE(x.size() == n);
    CHECK((x.array() >= -1e-12).all());
    CHECK((a * x - y).norm() < 1e-9);
    const Eigen::VectorXd ref = brute_force_face(a, y, c);
    CHECK((x - ref).norm() < 1e-7);
  }
}

TEST_CASE("both solvers are deterministic") {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXd a = random_matrix(rng, 3, 5);
  Eigen::VectorXd b(3);
  b << 0.3, -0.7, 0.2;
  const Eigen::VectorXd x1 = qreduct::lsq::nnls(a, b);
  const Eigen::VectorXd x2 = qreduct::lsq::nnls(a, b);
  CHECK(x1 == x2);

  Eigen::VectorXd x0(5), c(5);
  x0 << 0.2, 0.4, 0.3, 0.5, 0.1;
  c << 1.0, -1.0, 0.5, 0.0, 2.0;
  const Eigen::VectorXd y = a * x0;
  const Eigen::VectorXd p1 = qreduct::lsq::project_to_face(a, y, c, x0);
  const Eigen::VectorXd p2 = qreduct::lsq::project_to_face(a, y, c, x0);
  CHECK(p1 == p2);
}
