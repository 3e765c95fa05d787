#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hedra/structure.hpp"

namespace hedra {

using Configuration = Positions;

inline constexpr double kGravity = 9.81;                   // m/s^2
inline constexpr double kDefaultMassPerLength = 0.05;      // kg/m

/// External loads on free nodes, stacked as (p_x; p_y; p_z).
using LoadVector = Eigen::VectorXd;

/// Linear force-density equilibrium A q = p restricted to free nodes.
///
/// Row block c (0: x, 1: y, 2: z) holds C^T diag(C c) for the free nodes, in
/// `free_nodes` order. Columns follow member (connectivity row) order.
struct EquilibriumSystem {
  Eigen::MatrixXd A;
  std::vector<int> free_nodes;
  std::map<int, int> free_node_index;  // node id -> position within a block
  int cable_count = 0;

  int free_count() const { return static_cast<int>(free_nodes.size()); }
  int member_count() const { return static_cast<int>(A.cols()); }
};

struct ForceState {
  Eigen::VectorXd q;  // N/m
  Eigen::VectorXd f;  // N
  double residual = 0.0;
};

EquilibriumSystem assemble(const ConnectivityMatrix& c, const Configuration& config,
                           const std::set<int>& fixed);

/// ||A q - p||_2
double residual(const EquilibriumSystem& sys, const Eigen::VectorXd& q, const LoadVector& p);

/// f_i = q_i l_i
Eigen::VectorXd forces_from_densities(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths);

struct Payload {
  int node = 0;
  Vec3 force = Vec3::Zero();  // N
};

/// Lumped self-weight plus explicit node masses and an optional point force.
/// Half of each member's mass goes to each endpoint; fixed-node entries are dropped.
LoadVector gravity_loads(const TensegrityModel& model, const Configuration& config,
                         double member_mass_per_length,
                         const std::map<int, double>& node_masses = {},
                         const std::optional<Payload>& payload = std::nullopt);

/// Scatters per-node 3-vectors (free nodes only) into a stacked load vector.
LoadVector stack_loads(const EquilibriumSystem& sys, const std::map<int, Vec3>& nodal);

/// Free node ids of a model in ascending order.
std::vector<int> free_nodes(const TensegrityModel& model);

}  // namespace hedra
