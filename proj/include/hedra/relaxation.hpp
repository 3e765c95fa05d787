#pragma once

#include <Eigen/Dense>

#include "hedra/errors.hpp"
#include "hedra/statics.hpp"
#include "hedra/structure.hpp"

namespace hedra {

inline constexpr double kDefaultNodeMass = 0.0035;  // kg, a 14 g tetrahedron over 4 nodes

enum class Damping { Kinetic, Viscous };

struct RelaxationParams {
  double time_step = 0.0;  // s; 0 picks 0.5 sqrt(node_mass / K_max)
  double node_mass = kDefaultNodeMass;
  Damping damping = Damping::Kinetic;
  double viscous_coefficient = 0.0;  // N s/m, viscous damping only
  int max_iterations = 2'000'000;
  double force_tolerance = 1e-6;     // N
  double kinetic_tolerance = 1e-12;  // J

  void validate() const;
};

struct RelaxationDiagnostics {
  int iterations = 0;
  int resets = 0;  // kinetic damping velocity resets
  double time_step = 0.0;
  double peak_force = 0.0;  // largest free-node residual at exit, N
  double kinetic_energy = 0.0;
  double potential_energy = 0.0;
  double min_cable_force = 0.0;  // smallest cable force seen in any step, N
  int slack_cables = 0;          // cables with zero force at exit
};

struct RelaxationResult {
  Configuration configuration;
  Eigen::VectorXd forces;  // member forces at exit, N (tension positive)
  RelaxationDiagnostics diagnostics;
};

class RelaxationDiverged : public Error {
 public:
  RelaxationDiverged(const std::string& what, Configuration last, RelaxationDiagnostics diag)
      : Error(what), last_(std::move(last)), diagnostics_(diag) {}
  const Configuration& last_state() const { return last_; }
  const RelaxationDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  Configuration last_;
  RelaxationDiagnostics diagnostics_;
};

/// Axial member forces: cables K max(0, l - l0), bars K (l - l0).
Eigen::VectorXd member_forces(const TensegrityModel& model, const Configuration& config,
                              const Eigen::VectorXd& rest);

/// Net force on each node (n x 3). Loads are stacked over free nodes as in
/// LoadVector; rows of fixed nodes are zero.
Positions nodal_forces(const TensegrityModel& model, const Configuration& config,
                       const Eigen::VectorXd& rest, const LoadVector& loads);

/// Elastic energy of all members minus the work of the (constant) loads.
double total_potential(const TensegrityModel& model, const Configuration& config,
                       const Eigen::VectorXd& rest, const LoadVector& loads);

/// Full member rest-length vector: the given cable rest lengths followed by
/// bar lengths measured on the model's as-built positions.
Eigen::VectorXd relaxation_rest_lengths(const TensegrityModel& model,
                                        const Eigen::VectorXd& cable_rest);

/// Dynamic relaxation of the free nodes from `initial` to static equilibrium.
/// Throws RelaxationDiverged if the residual does not drop below tolerance.
RelaxationResult relax(const TensegrityModel& model, const Configuration& initial,
                       const Eigen::VectorXd& rest, const LoadVector& loads,
                       const RelaxationParams& params = {});

}  // namespace hedra
