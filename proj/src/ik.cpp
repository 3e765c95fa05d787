#include "hedra/ik.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hedra/active_set_qp.hpp"
#include "hedra/errors.hpp"

namespace hedra {

namespace {

constexpr double kBoundSlack = 1e-9;  // N/m

int numerical_rank(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0 || singular_values[0] <= 0.0) return 0;
  const double cutoff = kRankTolerance * singular_values[0];
  int rank = 0;
  while (rank < singular_values.size() && singular_values[rank] > cutoff) ++rank;
  return rank;
}

}  // namespace

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank = numerical_rank(svd.singularValues());
  const Eigen::VectorXd inv = svd.singularValues().head(rank).cwiseInverse();
  return svd.matrixV().leftCols(rank) * inv.asDiagonal() *
         svd.matrixU().leftCols(rank).transpose();
}

SvdSolution solve_general(const EquilibriumSystem& sys, const LoadVector& p, double tol) {
  if (sys.A.rows() == 0 || sys.A.cols() == 0) {
    throw EmptySystem("cannot solve an empty equilibrium system");
  }
  if (p.size() != sys.A.rows()) {
    throw DimensionMismatch("load vector has " + std::to_string(p.size()) + " entries, expected " +
                            std::to_string(sys.A.rows()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const int rank = numerical_rank(sigma);

  SvdSolution out;
  out.rank = rank;
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd coeffs =
      (u.leftCols(rank).transpose() * p).cwiseQuotient(sigma.head(rank));
  out.particular = v.leftCols(rank) * coeffs;
  out.nullspace = v.rightCols(v.cols() - rank);
  out.least_squares_residual = (sys.A * out.particular - p).norm();
  if (out.least_squares_residual > tol * std::max(1.0, p.norm())) {
    throw InfeasibleLoad("load is outside the range of the equilibrium matrix (least-squares residual " +
                             std::to_string(out.least_squares_residual) + " N)",
                         out.least_squares_residual);
  }
  return out;
}

double cable_energy(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths,
                    const Eigen::VectorXd& stiffness, int cables) {
  double e = 0.0;
  for (int i = 0; i < cables; ++i) {
    const double f = q[i] * lengths[i];
    e += f * f / (2.0 * stiffness[i]);
  }
  return e;
}

DensityResult optimize_densities(const EquilibriumSystem& sys, const LoadVector& p,
                                 const Eigen::VectorXd& q_min, const Eigen::VectorXd& stiffness,
                                 const Eigen::VectorXd& lengths, double tol) {
  const int s = sys.cable_count;
  const int m = sys.member_count();
  if (q_min.size() != s || stiffness.size() != m || lengths.size() != m) {
    throw DimensionMismatch("optimize_densities: expected " + std::to_string(s) +
                            " cable bounds and " + std::to_string(m) + " member values");
  }
  for (int i = 0; i < s; ++i) {
    if (!(q_min[i] >= 0.0)) throw InvalidParameter("q_min must be non-negative");
    if (!(stiffness[i] > 0.0) || !(lengths[i] > 0.0)) {
      throw InvalidParameter("cable stiffness and length must be positive");
    }
  }

  const SvdSolution general = solve_general(sys, p, tol);
  DensityResult out;
  out.rank = general.rank;
  out.nullspace_dim = static_cast<int>(general.nullspace.cols());
  Eigen::VectorXd q = general.particular;

  if (s > 0) {
    // Keep only nullspace directions that change some cable density.
    Eigen::MatrixXd basis(m, 0);
    if (general.nullspace.cols() > 0) {
      const Eigen::MatrixXd cable_rows = general.nullspace.topRows(s);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(cable_rows, Eigen::ComputeFullV);
      const Eigen::VectorXd& sv = svd.singularValues();
      int kept = 0;
      while (kept < sv.size() && sv[kept] > kRankTolerance) ++kept;
      basis = general.nullspace * svd.matrixV().leftCols(kept);
    }

    const Eigen::VectorXd q0 = general.particular.head(s);
    Eigen::VectorXd weight =
        lengths.head(s).array().square() / stiffness.head(s).array();
    weight /= weight.mean();

    if (basis.cols() == 0) {
      if (((q0 - q_min).array() < -kBoundSlack).any()) {
        throw NotStaticallyFeasible("pose not statically feasible: unique force densities put a "
                                    "cable below the minimum force density");
      }
    } else {
      const Eigen::MatrixXd bs = basis.topRows(s);
      QuadraticProgram qp;
      qp.G = bs.transpose() * weight.asDiagonal() * bs;
      qp.g = bs.transpose() * weight.asDiagonal() * q0;
      qp.C = bs.transpose();
      qp.d = q_min - q0;
      const QpResult res = solve_qp(qp);
      out.iterations = res.iterations;
      if (res.status == QpResult::Status::Infeasible) {
        throw NotStaticallyFeasible(
            "pose not statically feasible: no force densities keep every cable at or above q_min");
      }
      if (res.status == QpResult::Status::IterationLimit) {
        throw Error("force density optimization hit its iteration limit");
      }
      q += basis * res.x;
    }

    for (int i = 0; i < s; ++i) {
      if (q[i] < q_min[i]) {
        if (q[i] < q_min[i] - kBoundSlack) {
          throw NotStaticallyFeasible("pose not statically feasible: cable " + std::to_string(i + 1) +
                                      " below q_min after optimization");
        }
        q[i] = q_min[i];  // active bound, rounding only
      }
    }
  }

  const double r = residual(sys, q, p);
  if (r > tol * std::max(1.0, p.norm())) {
    throw Error("force density solution residual " + std::to_string(r) + " N exceeds tolerance");
  }
  out.q = q;
  out.objective = cable_energy(q, lengths, stiffness, s);
  return out;
}

DensityResult optimize_densities(const EquilibriumSystem& sys, const LoadVector& p, double q_min,
                                 const Eigen::VectorXd& stiffness, const Eigen::VectorXd& lengths,
                                 double tol) {
  return optimize_densities(sys, p, Eigen::VectorXd::Constant(sys.cable_count, q_min), stiffness,
                            lengths, tol);
}

Eigen::VectorXd rest_lengths(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths,
                             const Eigen::VectorXd& stiffness) {
  if (q.size() != lengths.size() || q.size() != stiffness.size()) {
    throw DimensionMismatch("rest_lengths: q, lengths and stiffness differ in size");
  }
  Eigen::VectorXd l0(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!(stiffness[i] > 0.0)) throw InvalidParameter("cable stiffness must be positive");
    if (q[i] >= stiffness[i]) {
      throw SlackImpossible("cable " + std::to_string(i + 1) + ": force density " +
                            std::to_string(q[i]) + " N/m reaches stiffness " +
                            std::to_string(stiffness[i]) + " N/m, rest length would be <= 0");
    }
    l0[i] = lengths[i] * (1.0 - q[i] / stiffness[i]);
  }
  return l0;
}

Configuration posed_configuration(const TensegrityModel& model,
                                  const std::vector<ModulePose>& poses) {
  const int k = model.module_count();
  if (k < 1) throw InvalidParameter("model has no module metadata");
  if (static_cast<int>(poses.size()) != k - 1) {
    throw DimensionMismatch("expected " + std::to_string(k - 1) + " module poses, got " +
                            std::to_string(poses.size()));
  }
  Configuration config = model.positions();
  for (int i = 1; i < k; ++i) {
    const ModulePose& pose = poses[i - 1];
    if (!pose.euler.allFinite() || !pose.translation.allFinite()) {
      throw InvalidParameter("module pose " + std::to_string(i) + " is not finite");
    }
    const Configuration block = config.middleRows(4 * i, 4);
    config.middleRows(4 * i, 4) = apply_pose(block, pose);
  }
  return config;
}

Eigen::VectorXd cable_lower_bounds(const TensegrityModel& model, const IkOptions& options) {
  Eigen::VectorXd bounds(model.cable_count());
  for (int i = 0; i < model.cable_count(); ++i) {
    const auto it = options.q_min_by_class.find(model.members()[i].cable_class);
    bounds[i] = it != options.q_min_by_class.end() ? it->second : options.q_min;
  }
  return bounds;
}

IkSolution solve_configuration(const TensegrityModel& model, const Configuration& config,
                               const LoadVector& loads, const IkOptions& options) {
  IkSolution sol;
  sol.configuration = config;
  sol.lengths = member_lengths(model, config);
  const EquilibriumSystem sys = assemble(connectivity(model), config, model.fixed_nodes());
  const Eigen::VectorXd stiffness = model.stiffness();
  const DensityResult dens = optimize_densities(sys, loads, cable_lower_bounds(model, options),
                                                stiffness, sol.lengths, options.tol);
  const int s = model.cable_count();
  sol.q = dens.q;
  sol.f = forces_from_densities(dens.q, sol.lengths);
  sol.rest_lengths = rest_lengths(dens.q.head(s), sol.lengths.head(s), stiffness.head(s));
  sol.active_lengths = active_lengths(model, config);
  sol.residual = residual(sys, dens.q, loads);
  sol.objective = dens.objective;
  sol.tolerance = options.tol;
  sol.iterations = dens.iterations;
  sol.rank = dens.rank;
  sol.nullspace_dim = dens.nullspace_dim;
  return sol;
}

IkSolution solve_pose(const TensegrityModel& model, const std::vector<ModulePose>& poses,
                      const LoadVector& loads, const IkOptions& options) {
  return solve_configuration(model, posed_configuration(model, poses), loads, options);
}

}  // namespace hedra
