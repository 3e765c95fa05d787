#include "hedra/statics.hpp"

#include <string>

#include "hedra/errors.hpp"

namespace hedra {

EquilibriumSystem assemble(const ConnectivityMatrix& c, const Configuration& config,
                           const std::set<int>& fixed) {
  const Eigen::Index n = c.entries.cols();
  if (config.rows() != n) {
    throw DimensionMismatch("configuration has " + std::to_string(config.rows()) +
                            " rows, connectivity has " + std::to_string(n) + " columns");
  }
  if (c.entries.rows() == 0) {
    throw EmptySystem("equilibrium system has no members");
  }
  EquilibriumSystem sys;
  sys.cable_count = c.cable_rows;
  for (int id = 1; id <= n; ++id) {
    if (!fixed.contains(id)) {
      sys.free_node_index[id] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(id);
    }
  }
  if (sys.free_nodes.empty()) {
    throw EmptySystem("every node is fixed; no equilibrium equations remain");
  }
  const int nf = sys.free_count();
  sys.A.resize(3 * nf, c.entries.rows());
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::VectorXd projected = c.entries * config.col(axis);  // C x
    const Eigen::MatrixXd block = c.entries.transpose() * projected.asDiagonal();
    for (int f = 0; f < nf; ++f) {
      sys.A.row(axis * nf + f) = block.row(sys.free_nodes[f] - 1);
    }
  }
  return sys;
}

double residual(const EquilibriumSystem& sys, const Eigen::VectorXd& q, const LoadVector& p) {
  if (q.size() != sys.A.cols() || p.size() != sys.A.rows()) {
    throw DimensionMismatch("residual: A is " + std::to_string(sys.A.rows()) + "x" +
                            std::to_string(sys.A.cols()) + ", q has " + std::to_string(q.size()) +
                            ", p has " + std::to_string(p.size()));
  }
  return (sys.A * q - p).norm();
}

Eigen::VectorXd forces_from_densities(const Eigen::VectorXd& q, const Eigen::VectorXd& lengths) {
  if (q.size() != lengths.size()) {
    throw DimensionMismatch("force densities and lengths differ in size");
  }
  return q.cwiseProduct(lengths);
}

std::vector<int> free_nodes(const TensegrityModel& model) {
  std::vector<int> out;
  for (int id = 1; id <= model.node_count(); ++id) {
    if (!model.is_fixed(id)) out.push_back(id);
  }
  return out;
}

LoadVector gravity_loads(const TensegrityModel& model, const Configuration& config,
                         double member_mass_per_length, const std::map<int, double>& node_masses,
                         const std::optional<Payload>& payload) {
  if (member_mass_per_length < 0.0) {
    throw InvalidParameter("member mass per length must be non-negative");
  }
  const int n = model.node_count();
  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd lengths = member_lengths(model, config);
  for (int i = 0; i < model.member_count(); ++i) {
    const Member& m = model.members()[i];
    const double half = 0.5 * member_mass_per_length * lengths[i];
    lumped[m.k - 1] += half;
    lumped[m.j - 1] += half;
  }
  for (const auto& [id, mass] : node_masses) {
    if (id < 1 || id > n) throw UnknownNode("node mass given for unknown node " + std::to_string(id));
    if (mass < 0.0) throw InvalidParameter("node masses must be non-negative");
    lumped[id - 1] += mass;
  }
  if (payload && (payload->node < 1 || payload->node > n)) {
    throw UnknownNode("payload on unknown node " + std::to_string(payload->node));
  }

  const std::vector<int> free = free_nodes(model);
  const int nf = static_cast<int>(free.size());
  LoadVector p = LoadVector::Zero(3 * nf);
  for (int f = 0; f < nf; ++f) {
    const int id = free[f];
    p[2 * nf + f] = -kGravity * lumped[id - 1];
    if (payload && payload->node == id) {
      for (int axis = 0; axis < 3; ++axis) p[axis * nf + f] += payload->force[axis];
    }
  }
  return p;
}

LoadVector stack_loads(const EquilibriumSystem& sys, const std::map<int, Vec3>& nodal) {
  const int nf = sys.free_count();
  LoadVector p = LoadVector::Zero(3 * nf);
  for (const auto& [id, force] : nodal) {
    const auto it = sys.free_node_index.find(id);
    if (it == sys.free_node_index.end()) {
      throw UnknownNode("load on node " + std::to_string(id) + " which is not a free node");
    }
    for (int axis = 0; axis < 3; ++axis) p[axis * nf + it->second] = force[axis];
  }
  return p;
}

}  // namespace hedra
