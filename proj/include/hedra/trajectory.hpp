#pragma once

#include <vector>

#include "hedra/structure.hpp"

namespace hedra {

enum class TrajectoryMode { Bend, Twist, Contract };

struct TrajectorySpec {
  TrajectoryMode mode = TrajectoryMode::Bend;
  double magnitude = 0.0;  // total angle in radians (bend/twist) or pitch ratio in (0, 1] (contract)
  double azimuth = 0.0;    // bend direction, radians from +x
  int steps = 1;

  void validate() const;
};

/// Per-step module poses (modules 1..k-1) for a trajectory.
///
/// Step s of n reaches fraction s/n of the final motion, so the last step is
/// the full command. Bend and twist are split equally over the k-1 joints,
/// each joint turning about its virtual ball joint center; contract scales
/// the spacing between consecutive modules.
std::vector<std::vector<ModulePose>> pose_sequence(const TrajectorySpec& spec,
                                                   const TensegrityModel& model);

/// Module poses with `fraction` of the commanded motion applied.
std::vector<ModulePose> chain_poses(const TrajectorySpec& spec, const TensegrityModel& model,
                                    double fraction);

}  // namespace hedra
