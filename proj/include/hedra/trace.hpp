#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hedra/statics.hpp"
#include "hedra/structure.hpp"

namespace hedra {

struct TraceRecord {
  int step = 0;
  Vec3 centroid = Vec3::Zero();  // end-effector triangle centroid, m
  double bend_deg = 0.0;
  double twist_deg = 0.0;
  Eigen::VectorXd cable_lengths;  // active routes, m
  std::optional<double> relax_error;  // max node deviation relaxed vs target, m
};

using Trace = std::vector<TraceRecord>;

/// Bend is the tilt of the top module's apex-to-triangle axis from +z.
/// Twist is the top triangle's turn about that axis relative to the as-built
/// stack, after undoing the tilt along the shortest arc.
TraceRecord trace_configuration(const TensegrityModel& model, const Configuration& config,
                                int step);

/// One record per configuration, steps numbered from 1.
Trace trace(const TensegrityModel& model, const std::vector<Configuration>& sequence);

/// Height of the as-built stack: base apex to top triangle plane.
double stack_height(const TensegrityModel& model);

}  // namespace hedra
