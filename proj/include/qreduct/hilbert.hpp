#pragma once

// Dense complex linear algebra over small labeled qubit registers.
// Conventions used throughout the library:
//   - a register is an ordered list of distinct node labels,
//   - the first node of the register is the most significant bit of every
//     basis index, so basis ket "01" on register (r,s) means r=0, s=1,
//   - states are column vectors of 2^n amplitudes over that ordering.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qreduct {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Numerical tolerances shared by the whole library (double precision,
// register sizes capped at 14 qubits).
namespace tol {
inline constexpr double ortho = 1e-12;            // orthonormality / Hermiticity
inline constexpr double zero_norm = 1e-12;        // projection annihilation
inline constexpr double psd_slack = 1e-10;        // eigenvalue slack in PSD checks
inline constexpr double singular_value = 1e-10;   // rank cutoff for Schmidt ranks
inline constexpr double residual = 1e-9;          // constraint-residual default
inline constexpr double amplitude_floor = 1e-12;  // amplitudes below are "absent"
inline constexpr double anticommutator = 1e-14;   // fermionic algebra checks
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A projection (or (anti)symmetrization) wiped the state out.
struct AnnihilatedError : Error {
  using Error::Error;
};

// A constraint system admits no solution within tolerance.
struct InfeasibleError : Error {
  InfeasibleError(const std::string& what, double res) : Error(what), residual(res) {}
  double residual = 0.0;
};

using NodeLabel = std::string;

class Register {
 public:
  Register() = default;
  explicit Register(std::vector<NodeLabel> nodes);

  std::size_t size() const { return nodes_.size(); }
  std::uint64_t dim() const { return std::uint64_t{1} << nodes_.size(); }
  const std::vector<NodeLabel>& nodes() const { return nodes_; }
  const NodeLabel& node(std::size_t pos) const { return nodes_.at(pos); }

  bool contains(const NodeLabel& n) const;
  // Position of the node counted from the most significant bit.
  std::size_t position_of(const NodeLabel& n) const;

  bool operator==(const Register& other) const { return nodes_ == other.nodes_; }
  bool operator!=(const Register& other) const { return !(*this == other); }

  // Bit of basis index `idx` belonging to the node at `pos`.
  int bit(std::uint64_t idx, std::size_t pos) const {
    return static_cast<int>((idx >> (nodes_.size() - 1 - pos)) & 1u);
  }
  std::string bitstring(std::uint64_t idx) const;
  std::uint64_t index_of_bitstring(const std::string& bits) const;

 private:
  std::vector<NodeLabel> nodes_;
};

Register concat(const Register& a, const Register& b);  // errors on overlap

class StateVector {
 public:
  StateVector() = default;
  StateVector(Register reg, Vector amp);

  const Register& reg() const { return reg_; }
  const Vector& amp() const { return amp_; }
  Vector& amp() { return amp_; }

  double norm() const { return amp_.norm(); }
  bool is_normalized(double eps = tol::ortho) const;

  Complex amplitude(const std::string& bits) const {
    return amp_(static_cast<Eigen::Index>(reg_.index_of_bitstring(bits)));
  }

 private:
  Register reg_;
  Vector amp_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(Register reg, Matrix m);

  const Register& reg() const { return reg_; }
  const Matrix& mat() const { return m_; }

  Complex trace() const { return m_.trace(); }
  bool is_hermitian(double eps = tol::ortho) const;
  // Smallest eigenvalue >= -psd_slack.
  bool is_positive_semidefinite(double eps = tol::psd_slack) const;

 private:
  Register reg_;
  Matrix m_;
};

// A linear subspace with an explicit orthonormal basis. When the subspace is
// spanned by computational basis kets the ket indices are kept around as
// well (constraint subspaces in this library are always of that shape).
class Subspace {
 public:
  Subspace() = default;
  Subspace(Register reg, Matrix basis);  // columns must be orthonormal

  static Subspace from_kets(Register reg, std::vector<std::uint64_t> kets);

  const Register& reg() const { return reg_; }
  const Matrix& basis() const { return basis_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const std::optional<std::vector<std::uint64_t>>& kets() const { return kets_; }

  // Membership within eps: || P v - v || <= eps * ||v||.
  bool contains(const StateVector& v, double eps = tol::ortho) const;
  Matrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  Register reg_;
  Matrix basis_;
  std::optional<std::vector<std::uint64_t>> kets_;
};

class LinearOperator {
 public:
  LinearOperator() = default;
  LinearOperator(Register reg, Matrix m);

  const Register& reg() const { return reg_; }
  const Matrix& mat() const { return m_; }

  static LinearOperator identity(const Register& reg);

  bool is_unitary(double eps = tol::ortho) const;
  bool is_hermitian(double eps = tol::ortho) const;

 private:
  Register reg_;
  Matrix m_;
};

// --- construction helpers -------------------------------------------------

StateVector basis_ket(const Register& reg, std::uint64_t index);
StateVector basis_ket(const Register& reg, const std::string& bits);

// --- core operations -------------------------------------------------------

// Kronecker product; registers must be disjoint.
StateVector tensor(const StateVector& a, const StateVector& b);

// Inner product <a|b> (conjugate-linear in a). Registers must match.
Complex inner(const StateVector& a, const StateVector& b);

// Euclidean distance ||a - b||. Registers must match.
double distance(const StateVector& a, const StateVector& b);

StateVector normalize(const StateVector& v);  // AnnihilatedError on ~zero norm

// Orthogonal projection of v onto s, renormalized, with the global phase
// chosen to maximize Re<result, v>. AnnihilatedError if the projection norm
// falls below tol::zero_norm.
StateVector project(const StateVector& v, const Subspace& s);

// Reduced density matrix over `keep` (subset of v's register, result keeps
// register order).
DensityMatrix partial_trace(const StateVector& v, const std::vector<NodeLabel>& keep);

StateVector apply(const LinearOperator& u, const StateVector& v);

// Operator Schmidt rank of u across the bipartition (cut | rest): number of
// singular values of the reshuffled matrix above tol::singular_value.
// `cut` must be a proper nonempty subset of the register.
int operator_schmidt_rank(const LinearOperator& u, const std::vector<NodeLabel>& cut);

// Singular values of the reshuffled operator (descending); exposed for tests.
std::vector<double> operator_schmidt_coefficients(const LinearOperator& u,
                                                  const std::vector<NodeLabel>& cut);

// Amplitude permutation sending the node at old position perm[k] to slot k.
// Returned matrix M satisfies (M v)[new index] = v[old index].
Matrix qubit_permutation_matrix(const Register& reg, const std::vector<std::size_t>& perm);

}  // namespace qreduct
