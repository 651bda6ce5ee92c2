#pragma once

// Shared test utilities: platform-stable uniforms, random states/unitaries,
// and a small Kronecker product (kept out of the library on purpose — tests
// build their own oracles).

#include "qreduct/hilbert.hpp"

#include <random>

namespace qtest {

using namespace qreduct;

inline double urand(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vector random_amp(std::mt19937_64& rng, Eigen::Index dim) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v(i) = Complex(2.0 * urand(rng) - 1.0, 2.0 * urand(rng) - 1.0);
  return v;
}

inline StateVector random_state(std::mt19937_64& rng, const Register& reg) {
  return normalize(StateVector(reg, random_amp(rng, static_cast<Eigen::Index>(reg.dim()))));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index dim) {
  const Matrix m = [&] {
    Matrix x(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        x(i, j) = Complex(2.0 * urand(rng) - 1.0, 2.0 * urand(rng) - 1.0);
    return x;
  }();
  return Eigen::HouseholderQR<Matrix>(m).householderQ();
}

}  // namespace qtest
