#include "hedra/trajectory.hpp"

#include <cmath>
#include <string>

#include "hedra/errors.hpp"

namespace hedra {

void TrajectorySpec::validate() const {
  if (steps < 1) throw InvalidParameter("trajectory needs at least one step");
  if (!std::isfinite(magnitude) || !std::isfinite(azimuth)) {
    throw InvalidParameter("trajectory magnitude and azimuth must be finite");
  }
  if (mode == TrajectoryMode::Contract && !(magnitude > 0.0 && magnitude <= 1.0)) {
    throw InvalidParameter("contraction ratio must be in (0, 1], got " + std::to_string(magnitude));
  }
}

namespace {

struct Rigid {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Rigid then_local(const Rigid& inner) const { return {r * inner.r, r * inner.t + t}; }
};

Rigid rotation_about(const Vec3& axis, double angle, const Vec3& center) {
  const Mat3 r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return {r, center - r * center};
}

}  // namespace

std::vector<ModulePose> chain_poses(const TrajectorySpec& spec, const TensegrityModel& model,
                                    double fraction) {
  const int k = model.module_count();
  if (k < 1 || !model.meta()) throw InvalidParameter("model has no module metadata");
  const int joints = k - 1;
  if (joints < 1 && spec.mode != TrajectoryMode::Contract) {
    throw InvalidParameter("bend and twist need at least two modules");
  }
  const Positions upright = model.positions();
  const double pitch = module_pitch(*model.meta());

  std::vector<ModulePose> poses;
  Rigid chain;
  for (int joint = 1; joint <= joints; ++joint) {
    Rigid step;
    switch (spec.mode) {
      case TrajectoryMode::Bend: {
        const Vec3 axis(-std::sin(spec.azimuth), std::cos(spec.azimuth), 0.0);
        step = rotation_about(axis, fraction * spec.magnitude / joints,
                              joint_center(model, upright, joint));
        break;
      }
      case TrajectoryMode::Twist:
        step = rotation_about(Vec3::UnitZ(), fraction * spec.magnitude / joints,
                              joint_center(model, upright, joint));
        break;
      case TrajectoryMode::Contract: {
        const double ratio = 1.0 - fraction * (1.0 - spec.magnitude);
        step.t = Vec3(0.0, 0.0, -(1.0 - ratio) * pitch);
        break;
      }
    }
    chain = chain.then_local(step);
    poses.push_back(ModulePose::from_transform(chain.r, chain.t));
  }
  return poses;
}

std::vector<std::vector<ModulePose>> pose_sequence(const TrajectorySpec& spec,
                                                   const TensegrityModel& model) {
  spec.validate();
  std::vector<std::vector<ModulePose>> out;
  out.reserve(spec.steps);
  for (int s = 1; s <= spec.steps; ++s) {
    out.push_back(chain_poses(spec, model, static_cast<double>(s) / spec.steps));
  }
  return out;
}

}  // namespace hedra
