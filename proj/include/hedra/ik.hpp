#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "hedra/statics.hpp"
#include "hedra/structure.hpp"

namespace hedra {

inline constexpr double kDefaultMinForceDensity = 500.0;  // N/m
inline constexpr double kDefaultTolerance = 1e-8;         // N

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct SvdSolution {
  Eigen::VectorXd particular;  // A^+ p
  Eigen::MatrixXd nullspace;   // orthonormal basis of ker A
  int rank = 0;
  double least_squares_residual = 0.0;
};

/// Moore-Penrose pseudoinverse via SVD, truncating at kRankTolerance.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a);

/// General solution q = A^+ p + N lambda of A q = p.
/// Throws InfeasibleLoad when ||A A^+ p - p|| > tol * max(1, ||p||).
SvdSolution solve_general(const EquilibriumSystem& sys, const LoadVector& p,
                          double tol = kDefaultTolerance);

struct DensityResult {
  Eigen::VectorXd q;
  double objective = 0.0;  // J, cable strain energy
  int iterations = 0;
  int rank = 0;
  int nullspace_dim = 0;
};

/// Minimum cable strain energy force densities.
///
/// Minimizes sum over cables of (q_i l_i)^2 / (2 K_i) subject to A q = p and
/// q_i >= q_min_i on every cable. Bars are free in sign and carry no cost.
/// The search runs over the nullspace coordinates of A; directions that only
/// move bar densities are dropped, which picks the minimum-norm optimizer.
DensityResult optimize_densities(const EquilibriumSystem& sys, const LoadVector& p,
                                 const Eigen::VectorXd& q_min, const Eigen::VectorXd& stiffness,
                                 const Eigen::VectorXd& lengths, double tol = kDefaultTolerance);

DensityResult optimize_densities(const EquilibriumSystem& sys, const LoadVector& p, double q_min,
                                 const Eigen::VectorXd& stiffness, const Eigen::VectorXd& lengths,
                                 double tol = kDefaultTolerance);

/// Cable strain energy sum (q_i l_i)^2 / (2 K_i) over the first `cables` members.
double cable_energy(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths,
                    const Eigen::VectorXd& stiffness, int cables);

/// l0_i = l_i (1 - q_i / K_i). Throws SlackImpossible when q_i >= K_i.
Eigen::VectorXd rest_lengths(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths,
                             const Eigen::VectorXd& stiffness);

struct IkOptions {
  double q_min = kDefaultMinForceDensity;
  std::map<CableClass, double> q_min_by_class;  // overrides q_min per cable class
  double tol = kDefaultTolerance;
};

struct IkSolution {
  Configuration configuration;
  Eigen::VectorXd lengths;  // all members
  Eigen::VectorXd q;        // all members, N/m
  Eigen::VectorXd f;        // all members, N
  Eigen::VectorXd rest_lengths;    // cables only
  Eigen::VectorXd active_lengths;  // one per route
  double residual = 0.0;
  double objective = 0.0;
  double tolerance = kDefaultTolerance;
  int iterations = 0;
  int rank = 0;
  int nullspace_dim = 0;
};

/// Positions of every node after posing modules 1..k-1; module 0 stays put.
Configuration posed_configuration(const TensegrityModel& model,
                                  const std::vector<ModulePose>& poses);

/// Per-cable lower bounds from the options.
Eigen::VectorXd cable_lower_bounds(const TensegrityModel& model, const IkOptions& options);

/// Pose -> configuration -> equilibrium -> densities -> rest lengths.
IkSolution solve_pose(const TensegrityModel& model, const std::vector<ModulePose>& poses,
                      const LoadVector& loads, const IkOptions& options = {});

IkSolution solve_configuration(const TensegrityModel& model, const Configuration& config,
                               const LoadVector& loads, const IkOptions& options = {});

}  // namespace hedra
