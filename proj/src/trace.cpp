#include "hedra/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hedra/errors.hpp"

namespace hedra {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct ModuleFrame {
  Vec3 axis;      // apex -> triangle centroid, unit
  Vec3 centroid;  // triangle centroid
  Vec3 spoke;     // centroid -> first triangle node
};

ModuleFrame frame_of(const TensegrityModel& model, const Configuration& config, int module) {
  const auto ids = model.module_nodes(module);
  ModuleFrame f;
  f.centroid = Vec3::Zero();
  for (int t = 1; t <= 3; ++t) f.centroid += config.row(ids[t] - 1).transpose();
  f.centroid /= 3.0;
  f.axis = (f.centroid - config.row(ids[0] - 1).transpose()).normalized();
  f.spoke = config.row(ids[1] - 1).transpose() - f.centroid;
  return f;
}

}  // namespace

TraceRecord trace_configuration(const TensegrityModel& model, const Configuration& config,
                                int step) {
  const int k = model.module_count();
  if (k < 1) throw InvalidParameter("trace needs module metadata");
  const ModuleFrame now = frame_of(model, config, k - 1);
  const ModuleFrame built = frame_of(model, model.positions(), k - 1);

  TraceRecord rec;
  rec.step = step;
  rec.centroid = now.centroid;
  rec.bend_deg = std::acos(std::clamp(now.axis.dot(Vec3::UnitZ()), -1.0, 1.0)) * kDeg;

  const Vec3 untilted = Eigen::Quaterniond::FromTwoVectors(now.axis, Vec3::UnitZ()) * now.spoke;
  const double cross = built.spoke.cross(untilted).z();
  rec.twist_deg = std::atan2(cross, built.spoke.dot(untilted)) * kDeg;
  rec.cable_lengths = active_lengths(model, config);
  return rec;
}

Trace trace(const TensegrityModel& model, const std::vector<Configuration>& sequence) {
  if (sequence.empty()) throw InvalidParameter("trace needs at least one configuration");
  Trace out;
  out.reserve(sequence.size());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    out.push_back(trace_configuration(model, sequence[i], static_cast<int>(i) + 1));
  }
  return out;
}

double stack_height(const TensegrityModel& model) {
  const auto& meta = model.meta();
  if (!meta) throw InvalidParameter("stack height needs module metadata");
  return (meta->modules - 1) * module_pitch(*meta) + meta->height;
}

}  // namespace hedra
