#include "qreduct/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

namespace qreduct {

Register::Register(std::vector<NodeLabel> nodes) : nodes_(std::move(nodes)) {
  std::set<NodeLabel> seen;
  for (const auto& n : nodes_) {
    if (n.empty()) throw Error("register: empty node label");
    if (!seen.insert(n).second) throw Error("register: duplicate node label '" + n + "'");
  }
  if (nodes_.size() > 63) throw Error("register: too many nodes");
}

bool Register::contains(const NodeLabel& n) const {
  return std::find(nodes_.begin(), nodes_.end(), n) != nodes_.end();
}

std::size_t Register::position_of(const NodeLabel& n) const {
  auto it = std::find(nodes_.begin(), nodes_.end(), n);
  if (it == nodes_.end()) throw Error("register: unknown node '" + n + "'");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::string Register::bitstring(std::uint64_t idx) const {
  std::string s(nodes_.size(), '0');
  for (std::size_t p = 0; p < nodes_.size(); ++p) s[p] = bit(idx, p) ? '1' : '0';
  return s;
}

std::uint64_t Register::index_of_bitstring(const std::string& bits) const {
  if (bits.size() != nodes_.size())
    throw Error("bitstring '" + bits + "' does not match register width");
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error("bitstring '" + bits + "' has non-binary digit");
    idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return idx;
}

Register concat(const Register& a, const Register& b) {
  for (const auto& n : b.nodes())
    if (a.contains(n)) throw Error("tensor: registers overlap on '" + n + "'");
  std::vector<NodeLabel> nodes = a.nodes();
  nodes.insert(nodes.end(), b.nodes().begin(), b.nodes().end());
  return Register(std::move(nodes));
}

StateVector::StateVector(Register reg, Vector amp) : reg_(std::move(reg)), amp_(std::move(amp)) {
  if (static_cast<std::uint64_t>(amp_.size()) != reg_.dim())
    throw Error("state vector size does not match register dimension");
  if (!amp_.allFinite()) throw Error("state vector has non-finite amplitudes");
}

bool StateVector::is_normalized(double eps) const {
  return std::abs(amp_.squaredNorm() - 1.0) <= eps;
}

DensityMatrix::DensityMatrix(Register reg, Matrix m) : reg_(std::move(reg)), m_(std::move(m)) {
  if (static_cast<std::uint64_t>(m_.rows()) != reg_.dim() || m_.rows() != m_.cols())
    throw Error("density matrix shape does not match register dimension");
  if (!m_.allFinite()) throw Error("density matrix has non-finite entries");
}

bool DensityMatrix::is_hermitian(double eps) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

bool DensityMatrix::is_positive_semidefinite(double eps) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -eps;
}

Subspace::Subspace(Register reg, Matrix basis) : reg_(std::move(reg)), basis_(std::move(basis)) {
  if (static_cast<std::uint64_t>(basis_.rows()) != reg_.dim())
    throw Error("subspace basis row count does not match register dimension");
  if (basis_.cols() == 0) throw Error("subspace: empty basis");
  Matrix gram = basis_.adjoint() * basis_;
  gram -= Matrix::Identity(basis_.cols(), basis_.cols());
  if (gram.cwiseAbs().maxCoeff() > tol::ortho)
    throw Error("subspace basis is not orthonormal");
}

Subspace Subspace::from_kets(Register reg, std::vector<std::uint64_t> kets) {
  if (kets.empty()) throw Error("subspace: empty ket list");
  std::set<std::uint64_t> seen;
  Matrix basis = Matrix::Zero(static_cast<Eigen::Index>(reg.dim()),
                              static_cast<Eigen::Index>(kets.size()));
  for (std::size_t c = 0; c < kets.size(); ++c) {
    if (kets[c] >= reg.dim()) throw Error("subspace: ket index out of range");
    if (!seen.insert(kets[c]).second) throw Error("subspace: duplicate ket index");
    basis(static_cast<Eigen::Index>(kets[c]), static_cast<Eigen::Index>(c)) = 1.0;
  }
  Subspace s(std::move(reg), std::move(basis));
  s.kets_ = std::move(kets);
  return s;
}

bool Subspace::contains(const StateVector& v, double eps) const {
  if (v.reg() != reg_) throw Error("subspace membership: register mismatch");
  Vector proj = basis_ * (basis_.adjoint() * v.amp());
  double n = v.norm();
  if (n == 0.0) return true;
  return (proj - v.amp()).norm() <= eps * n;
}

LinearOperator::LinearOperator(Register reg, Matrix m) : reg_(std::move(reg)), m_(std::move(m)) {
  if (static_cast<std::uint64_t>(m_.rows()) != reg_.dim() || m_.rows() != m_.cols())
    throw Error("operator shape does not match register dimension");
  if (!m_.allFinite()) throw Error("operator has non-finite entries");
}

LinearOperator LinearOperator::identity(const Register& reg) {
  return LinearOperator(reg, Matrix::Identity(static_cast<Eigen::Index>(reg.dim()),
                                              static_cast<Eigen::Index>(reg.dim())));
}

bool LinearOperator::is_unitary(double eps) const {
  Matrix d = m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols());
  return d.cwiseAbs().maxCoeff() <= eps;
}

bool LinearOperator::is_hermitian(double eps) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

StateVector basis_ket(const Register& reg, std::uint64_t index) {
  if (index >= reg.dim()) throw Error("basis ket index out of range");
  Vector amp = Vector::Zero(static_cast<Eigen::Index>(reg.dim()));
  amp(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(reg, std::move(amp));
}

StateVector basis_ket(const Register& reg, const std::string& bits) {
  return basis_ket(reg, reg.index_of_bitstring(bits));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Register reg = concat(a.reg(), b.reg());
  const auto da = a.amp().size(), db = b.amp().size();
  Vector amp(da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    amp.segment(i * db, db) = a.amp()(i) * b.amp();
  return StateVector(std::move(reg), std::move(amp));
}

Complex inner(const StateVector& a, const StateVector& b) {
  if (a.reg() != b.reg()) throw Error("inner product: register mismatch");
  return a.amp().dot(b.amp());
}

double distance(const StateVector& a, const StateVector& b) {
  if (a.reg() != b.reg()) throw Error("distance: register mismatch");
  return (a.amp() - b.amp()).norm();
}

StateVector normalize(const StateVector& v) {
  double n = v.norm();
  if (n < tol::zero_norm) throw AnnihilatedError("normalize: state annihilated");
  return StateVector(v.reg(), v.amp() / n);
}

StateVector project(const StateVector& v, const Subspace& s) {
  if (v.reg() != s.reg()) throw Error("project: register mismatch");
  Vector p = s.basis() * (s.basis().adjoint() * v.amp());
  double n = p.norm();
  if (n < tol::zero_norm)
    throw AnnihilatedError("project: state annihilated by the projection");
  p /= n;
  // Global phase: maximize Re<result, v>. For a true orthogonal projection
  // the overlap is already real nonnegative; the alignment also covers
  // callers that hand in a basis-changed result.
  Complex ov = p.dot(v.amp());
  if (std::abs(ov) > tol::zero_norm) p *= ov / std::abs(ov);
  return StateVector(v.reg(), std::move(p));
}

DensityMatrix partial_trace(const StateVector& v, const std::vector<NodeLabel>& keep) {
  const Register& reg = v.reg();
  std::vector<std::size_t> keep_pos;
  keep_pos.reserve(keep.size());
  std::set<std::size_t> keep_set;
  for (const auto& n : keep) {
    std::size_t p = reg.position_of(n);
    if (!keep_set.insert(p).second) throw Error("partial trace: duplicate keep node");
    keep_pos.push_back(p);
  }
  // Result register preserves the order of the parent register.
  std::sort(keep_pos.begin(), keep_pos.end());
  std::vector<NodeLabel> kept_nodes;
  std::vector<std::size_t> traced_pos;
  for (std::size_t p = 0; p < reg.size(); ++p) {
    if (keep_set.count(p)) kept_nodes.push_back(reg.node(p));
    else traced_pos.push_back(p);
  }
  if (kept_nodes.empty()) throw Error("partial trace: nothing kept");

  const std::size_t n = reg.size();
  const std::size_t k = keep_pos.size(), t = traced_pos.size();
  auto compose = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t idx = 0;
    for (std::size_t a = 0; a < k; ++a)
      idx |= ((kept_bits >> (k - 1 - a)) & 1u) << (n - 1 - keep_pos[a]);
    for (std::size_t a = 0; a < t; ++a)
      idx |= ((traced_bits >> (t - 1 - a)) & 1u) << (n - 1 - traced_pos[a]);
    return idx;
  };

  const std::uint64_t dk = std::uint64_t{1} << k, dt = std::uint64_t{1} << t;
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::uint64_t i = 0; i < dk; ++i)
    for (std::uint64_t j = 0; j <= i; ++j) {
      Complex acc = 0.0;
      for (std::uint64_t w = 0; w < dt; ++w)
        acc += v.amp()(static_cast<Eigen::Index>(compose(i, w))) *
               std::conj(v.amp()(static_cast<Eigen::Index>(compose(j, w))));
      rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
      if (i != j) rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(acc);
    }
  return DensityMatrix(Register(std::move(kept_nodes)), std::move(rho));
}

StateVector apply(const LinearOperator& u, const StateVector& v) {
  if (u.reg() != v.reg()) throw Error("apply: register mismatch");
  return StateVector(v.reg(), u.mat() * v.amp());
}

Matrix qubit_permutation_matrix(const Register& reg, const std::vector<std::size_t>& perm) {
  const std::size_t n = reg.size();
  if (perm.size() != n) throw Error("qubit permutation: wrong length");
  std::set<std::size_t> seen(perm.begin(), perm.end());
  if (seen.size() != n || *seen.rbegin() >= n) throw Error("qubit permutation: not a permutation");
  const std::uint64_t d = reg.dim();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < d; ++i) {
    std::uint64_t j = 0;
    for (std::size_t slot = 0; slot < n; ++slot)
      j |= static_cast<std::uint64_t>((i >> (n - 1 - perm[slot])) & 1u) << (n - 1 - slot);
    m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return m;
}

std::vector<double> operator_schmidt_coefficients(const LinearOperator& u,
                                                  const std::vector<NodeLabel>& cut) {
  const Register& reg = u.reg();
  if (cut.empty()) throw Error("schmidt cut: empty side");
  std::set<std::size_t> side_a;
  for (const auto& n : cut)
    if (!side_a.insert(reg.position_of(n)).second)
      throw Error("schmidt cut: duplicate node '" + n + "'");
  if (side_a.size() == reg.size()) throw Error("schmidt cut: cut must be a proper subset");

  // Reorder qubits so side A comes first, then reshuffle
  // U[(iA iB),(jA jB)] -> R[(iA jA),(iB jB)] and take singular values.
  std::vector<std::size_t> perm;
  for (std::size_t p = 0; p < reg.size(); ++p)
    if (side_a.count(p)) perm.push_back(p);
  const std::size_t na = perm.size();
  for (std::size_t p = 0; p < reg.size(); ++p)
    if (!side_a.count(p)) perm.push_back(p);

  Matrix P = qubit_permutation_matrix(reg, perm);
  Matrix m = P * u.mat() * P.transpose();

  const Eigen::Index da = Eigen::Index{1} << na;
  const Eigen::Index db = static_cast<Eigen::Index>(reg.dim()) / da;
  Matrix r(da * da, db * db);
  for (Eigen::Index ia = 0; ia < da; ++ia)
    for (Eigen::Index ja = 0; ja < da; ++ja)
      for (Eigen::Index ib = 0; ib < db; ++ib)
        for (Eigen::Index jb = 0; jb < db; ++jb)
          r(ia * da + ja, ib * db + jb) = m(ia * db + ib, ja * db + jb);

  Eigen::JacobiSVD<Matrix> svd(r);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

int operator_schmidt_rank(const LinearOperator& u, const std::vector<NodeLabel>& cut) {
  auto sv = operator_schmidt_coefficients(u, cut);
  int rank = 0;
  for (double s : sv)
    if (s > tol::singular_value) ++rank;
  return rank;
}

}  // namespace qreduct
