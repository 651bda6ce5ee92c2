#include "qreduct/lsq.hpp"

#include <limits>
#include <vector>

namespace qreduct::lsq {

namespace {
constexpr double kTol = 1e-12;

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& a, const std::vector<int>& cols) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
  return sub;
}
}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  // Columns whose entry attempt was immediately blocked (a numerical corner
  // the exact algorithm never hits); they stay out for the rest of the call.
  std::vector<bool> banned(n, false);
  const double eps = kTol * std::max(1.0, b.cwiseAbs().maxCoeff());
  const int max_iter = 3 * n + 12;

  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd w = a.transpose() * (b - a * x);
    int t = -1;
    double best = eps;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && !banned[i] && w(i) > best) {
        best = w(i);
        t = i;
      }
    if (t < 0) break;  // KKT satisfied
    passive[t] = true;

    for (;;) {
      std::vector<int> pidx;
      for (int i = 0; i < n; ++i)
        if (passive[i]) pidx.push_back(i);
      Eigen::MatrixXd ap = take_columns(a, pidx);
      Eigen::VectorXd z = ap.colPivHouseholderQr().solve(b);

      double alpha = std::numeric_limits<double>::infinity();
      int blocker = -1;
      for (std::size_t k = 0; k < pidx.size(); ++k)
        if (z(static_cast<Eigen::Index>(k)) <= eps) {
          const double xi = x(pidx[k]);
          const double step = xi / (xi - z(static_cast<Eigen::Index>(k)));
          if (step < alpha) {
            alpha = step;
            blocker = pidx[k];
          }
        }
      if (blocker < 0) {
        x.setZero();
        for (std::size_t k = 0; k < pidx.size(); ++k) x(pidx[k]) = z(static_cast<Eigen::Index>(k));
        break;
      }
      Eigen::VectorXd zfull = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < pidx.size(); ++k) zfull(pidx[k]) = z(static_cast<Eigen::Index>(k));
      x += alpha * (zfull - x);
      for (int i = 0; i < n; ++i)
        if (passive[i] && x(i) <= eps) {
          x(i) = 0.0;
          passive[i] = false;
        }
      if (blocker == t) {  // entering column immediately blocked; give up on it
        banned[t] = true;
        break;
      }
    }
  }
  return x.cwiseMax(0.0);
}

Eigen::VectorXd project_to_face(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& c, Eigen::VectorXd x) {
  const int n = static_cast<int>(a.cols());
  std::vector<bool> active(n, false);
  for (int i = 0; i < n; ++i) active[i] = x(i) <= kTol;
  const int max_iter = 4 * n + 16;

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> fidx;
    for (int i = 0; i < n; ++i)
      if (!active[i]) fidx.push_back(i);

    // Projection of c_F onto {x_F : A_F x_F = y}: x_F = c_F - A_F^T lambda,
    // (A_F A_F^T) lambda = A_F c_F - y. The system is consistent because the
    // current x witnesses feasibility of the working set.
    Eigen::MatrixXd af = take_columns(a, fidx);
    Eigen::VectorXd cf(static_cast<Eigen::Index>(fidx.size()));
    for (std::size_t k = 0; k < fidx.size(); ++k) cf(static_cast<Eigen::Index>(k)) = c(fidx[k]);
    Eigen::MatrixXd gram = af * af.transpose();
    Eigen::VectorXd lambda =
        gram.completeOrthogonalDecomposition().solve(af * cf - y);
    Eigen::VectorXd xf = cf - af.transpose() * lambda;

    Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < fidx.size(); ++k) target(fidx[k]) = xf(static_cast<Eigen::Index>(k));

    Eigen::VectorXd d = target - x;
    if (d.cwiseAbs().maxCoeff() <= kTol) {
      // At the working-set minimizer; check multipliers of the active bounds.
      int release = -1;
      double worst = -kTol;
      for (int i = 0; i < n; ++i)
        if (active[i]) {
          const double mu = -c(i) + a.col(i).dot(lambda);
          if (mu < worst) {
            worst = mu;
            release = i;
          }
        }
      if (release < 0) return x.cwiseMax(0.0);
      active[release] = false;
      continue;
    }

    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < n; ++i)
      if (!active[i] && d(i) < -kTol) {
        const double step = x(i) / -d(i);
        if (step < alpha) {
          alpha = step;
          blocker = i;
        }
      }
    x += alpha * d;
    if (blocker >= 0) {
      x(blocker) = 0.0;
      active[blocker] = true;
    }
  }
  return x.cwiseMax(0.0);
}

}  // namespace qreduct::lsq
