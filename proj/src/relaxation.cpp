#include "hedra/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hedra {

void RelaxationParams::validate() const {
  if (time_step < 0.0 || !std::isfinite(time_step)) {
    throw InvalidParameter("time step must be positive (or 0 for automatic)");
  }
  if (!(node_mass > 0.0)) throw InvalidParameter("node mass must be positive");
  if (!(force_tolerance > 0.0) || !(kinetic_tolerance > 0.0)) {
    throw InvalidParameter("relaxation tolerances must be positive");
  }
  if (max_iterations < 1) throw InvalidParameter("max_iterations must be at least 1");
  if (damping == Damping::Viscous && viscous_coefficient < 0.0) {
    throw InvalidParameter("viscous coefficient must be non-negative");
  }
}

namespace {

void check_sizes(const TensegrityModel& model, const Configuration& config,
                 const Eigen::VectorXd& rest) {
  if (config.rows() != model.node_count()) {
    throw DimensionMismatch("configuration rows do not match the model's node count");
  }
  if (rest.size() != model.member_count()) {
    throw DimensionMismatch("expected " + std::to_string(model.member_count()) +
                            " rest lengths, got " + std::to_string(rest.size()));
  }
}

/// Loads scattered to an n x 3 matrix (zero rows on fixed nodes).
Positions nodal_loads(const TensegrityModel& model, const LoadVector& loads) {
  const std::vector<int> free = free_nodes(model);
  const int nf = static_cast<int>(free.size());
  if (loads.size() != 3 * nf) {
    throw DimensionMismatch("load vector has " + std::to_string(loads.size()) +
                            " entries, expected " + std::to_string(3 * nf));
  }
  Positions out = Positions::Zero(model.node_count(), 3);
  for (int f = 0; f < nf; ++f) {
    for (int axis = 0; axis < 3; ++axis) out(free[f] - 1, axis) = loads[axis * nf + f];
  }
  return out;
}

double axial_force(const Member& m, double length, double rest) {
  const double f = m.stiffness * (length - rest);
  return m.is_cable() ? std::max(0.0, f) : f;
}

// Accumulates internal forces into `out` and returns the member forces.
void internal_forces(const TensegrityModel& model, const Configuration& config,
                     const Eigen::VectorXd& rest, Positions& out, Eigen::VectorXd& forces) {
  const auto& members = model.members();
  for (int i = 0; i < model.member_count(); ++i) {
    const Member& m = members[i];
    const Eigen::RowVector3d d = config.row(m.j - 1) - config.row(m.k - 1);
    const double l = d.norm();
    if (!(l > 0.0)) {
      throw DegenerateGeometry("member " + std::to_string(m.id) + " collapsed to zero length");
    }
    forces[i] = axial_force(m, l, rest[i]);
    const Eigen::RowVector3d pull = (forces[i] / l) * d;  // on k, toward j when in tension
    out.row(m.k - 1) += pull;
    out.row(m.j - 1) -= pull;
  }
}

}  // namespace

Eigen::VectorXd member_forces(const TensegrityModel& model, const Configuration& config,
                              const Eigen::VectorXd& rest) {
  check_sizes(model, config, rest);
  Positions scratch = Positions::Zero(model.node_count(), 3);
  Eigen::VectorXd forces(model.member_count());
  internal_forces(model, config, rest, scratch, forces);
  return forces;
}

Positions nodal_forces(const TensegrityModel& model, const Configuration& config,
                       const Eigen::VectorXd& rest, const LoadVector& loads) {
  check_sizes(model, config, rest);
  Positions out = nodal_loads(model, loads);
  Eigen::VectorXd forces(model.member_count());
  internal_forces(model, config, rest, out, forces);
  for (int id : model.fixed_nodes()) out.row(id - 1).setZero();
  return out;
}

double total_potential(const TensegrityModel& model, const Configuration& config,
                       const Eigen::VectorXd& rest, const LoadVector& loads) {
  check_sizes(model, config, rest);
  double energy = 0.0;
  const auto& members = model.members();
  for (int i = 0; i < model.member_count(); ++i) {
    const Member& m = members[i];
    double stretch = (config.row(m.j - 1) - config.row(m.k - 1)).norm() - rest[i];
    if (m.is_cable()) stretch = std::max(0.0, stretch);
    energy += 0.5 * m.stiffness * stretch * stretch;
  }
  const Positions p = nodal_loads(model, loads);
  energy -= (p.array() * config.array()).sum();
  return energy;
}

Eigen::VectorXd relaxation_rest_lengths(const TensegrityModel& model,
                                        const Eigen::VectorXd& cable_rest) {
  if (cable_rest.size() != model.cable_count()) {
    throw DimensionMismatch("expected " + std::to_string(model.cable_count()) +
                            " cable rest lengths, got " + std::to_string(cable_rest.size()));
  }
  Eigen::VectorXd rest = member_lengths(model, model.positions());
  rest.head(model.cable_count()) = cable_rest;
  return rest;
}

RelaxationResult relax(const TensegrityModel& model, const Configuration& initial,
                       const Eigen::VectorXd& rest, const LoadVector& loads,
                       const RelaxationParams& params) {
  params.validate();
  check_sizes(model, initial, rest);
  for (int i = 0; i < model.member_count(); ++i) {
    if (!(rest[i] > 0.0)) {
      throw InvalidParameter("rest length of member " + std::to_string(model.members()[i].id) +
                             " must be positive");
    }
  }
  const Positions external = nodal_loads(model, loads);
  const double k_max = model.stiffness().maxCoeff();

  RelaxationDiagnostics diag;
  diag.time_step = params.time_step > 0.0 ? params.time_step
                                          : 0.5 * std::sqrt(params.node_mass / k_max);
  diag.min_cable_force = std::numeric_limits<double>::infinity();
  const double dt = diag.time_step;
  const double inv_mass = 1.0 / params.node_mass;

  Eigen::Array<double, Eigen::Dynamic, 1> free_mask =
      Eigen::Array<double, Eigen::Dynamic, 1>::Ones(model.node_count());
  for (int id : model.fixed_nodes()) free_mask[id - 1] = 0.0;

  Configuration x = initial;
  Positions v = Positions::Zero(model.node_count(), 3);
  Positions force(model.node_count(), 3);
  Eigen::VectorXd member_f(model.member_count());
  double previous_ke = 0.0;
  const int s = model.cable_count();

  auto evaluate = [&] {
    force = external;
    internal_forces(model, x, rest, force, member_f);
    force.array().colwise() *= free_mask;
    if (s > 0) diag.min_cable_force = std::min(diag.min_cable_force, member_f.head(s).minCoeff());
    return force.rowwise().norm().maxCoeff();
  };

  auto finish = [&] {
    diag.peak_force = force.rowwise().norm().maxCoeff();
    diag.potential_energy = total_potential(model, x, rest, loads);
    diag.slack_cables = static_cast<int>((member_f.head(s).array() == 0.0).count());
    if (s == 0) diag.min_cable_force = 0.0;
  };

  for (int it = 0; it < params.max_iterations; ++it) {
    const double peak = evaluate();
    const double ke = 0.5 * params.node_mass * v.squaredNorm();
    diag.kinetic_energy = ke;
    if (peak < params.force_tolerance && ke < params.kinetic_tolerance) {
      diag.iterations = it;
      finish();
      return {x, member_f, diag};
    }
    if (params.damping == Damping::Viscous) {
      v += dt * inv_mass * (force - params.viscous_coefficient * v);
    } else {
      v += dt * inv_mass * force;
      const double new_ke = 0.5 * params.node_mass * v.squaredNorm();
      if (new_ke < previous_ke) {
        // Past a kinetic energy peak: stop and restart from rest.
        v.setZero();
        ++diag.resets;
        previous_ke = 0.0;
        continue;
      }
      previous_ke = new_ke;
    }
    x += dt * v;
    if (!x.allFinite()) {
      diag.iterations = it + 1;
      throw RelaxationDiverged("relaxation produced non-finite positions", x, diag);
    }
  }
  diag.iterations = params.max_iterations;
  evaluate();
  finish();
  throw RelaxationDiverged("relaxation did not converge in " +
                               std::to_string(params.max_iterations) + " iterations (peak force " +
                               std::to_string(diag.peak_force) + " N)",
                           x, diag);
}

}  // namespace hedra
