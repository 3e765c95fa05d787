#include "hedra/active_set_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hedra/errors.hpp"

namespace hedra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

QpResult solve_qp(const QuadraticProgram& qp, double feasibility_tol) {
  const Eigen::Index n = qp.G.rows();
  const Eigen::Index m = qp.C.cols();
  if (qp.G.cols() != n || qp.g.size() != n || qp.C.rows() != n || qp.d.size() != m) {
    throw DimensionMismatch("quadratic program dimensions are inconsistent");
  }

  QpResult result;
  result.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::LLT<Eigen::MatrixXd> llt(qp.G);
  if (llt.info() != Eigen::Success) {
    throw InvalidParameter("quadratic program Hessian is not positive definite");
  }
  // G^{-1} = J J^T with J = L^{-T}.
  const Eigen::MatrixXd J =
      llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd Jt_C = J.transpose() * qp.C;

  Eigen::VectorXd x = -llt.solve(qp.g);
  std::vector<int> active;
  std::vector<double> u;  // multipliers of `active`

  const Eigen::VectorXd col_norms = qp.C.colwise().norm();
  auto slack = [&](Eigen::Index j) { return qp.C.col(j).dot(x) - qp.d[j]; };
  auto violated = [&](Eigen::Index j) {
    const double scale = 1.0 + std::abs(qp.d[j]) + col_norms[j] * x.norm();
    return slack(j) < -feasibility_tol * scale;
  };

  const int max_iterations = static_cast<int>(10 * (n + m) + 100);
  while (true) {
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      if (!violated(j)) continue;
      const double s = slack(j) / std::max(col_norms[j], 1e-300);
      if (p < 0 || s < worst) {
        p = j;
        worst = s;
      }
    }
    if (p < 0) break;

    double u_p = 0.0;
    while (true) {
      if (++result.iterations > max_iterations) {
        result.status = QpResult::Status::IterationLimit;
        result.x = x;
        result.active = active;
        return result;
      }
      const Eigen::VectorXd target = Jt_C.col(p);
      Eigen::VectorXd r;
      Eigen::VectorXd res = target;
      if (!active.empty()) {
        Eigen::MatrixXd B(n, static_cast<Eigen::Index>(active.size()));
        for (std::size_t a = 0; a < active.size(); ++a) B.col(a) = Jt_C.col(active[a]);
        r = B.householderQr().solve(target);
        res = target - B * r;
      }
      const Eigen::VectorXd z = J * res;
      const double curvature = res.squaredNorm();  // z^T n_p
      const bool dependent = curvature <= 1e-14 * std::max(target.squaredNorm(), 1e-300);

      // Partial step: largest t keeping the active multipliers non-negative.
      double t1 = kInf;
      std::size_t blocking = 0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (r[a] > 0.0) {
          const double ratio = u[a] / r[a];
          if (ratio < t1) {
            t1 = ratio;
            blocking = a;
          }
        }
      }
      const double t2 = dependent ? kInf : -slack(p) / curvature;
      const double t = std::min(t1, t2);
      if (t == kInf) {
        result.status = QpResult::Status::Infeasible;
        result.x = x;
        result.active = active;
        return result;
      }

      if (!dependent) x += t * z;
      for (std::size_t a = 0; a < active.size(); ++a) u[a] -= t * r[a];
      u_p += t;

      if (t == t2) {
        active.push_back(static_cast<int>(p));
        u.push_back(u_p);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(blocking));
      u.erase(u.begin() + static_cast<std::ptrdiff_t>(blocking));
    }
  }

  result.x = x;
  result.active = active;
  for (std::size_t a = 0; a < active.size(); ++a) result.multipliers[active[a]] = u[a];
  return result;
}

}  // namespace hedra
