#include "hedra/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hedra/errors.hpp"

namespace hedra {

void TetraParams::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("tetrahedron radius must be positive, got " + std::to_string(radius));
  }
  if (!(height > 0.0) || !std::isfinite(height)) {
    throw InvalidParameter("tetrahedron height must be positive, got " + std::to_string(height));
  }
}

Mat3 rotation_zyx(double yaw, double pitch, double roll) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(yaw, Vec3::UnitZ()) * AngleAxisd(pitch, Vec3::UnitY()) *
          AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Mat3 ModulePose::rotation() const { return rotation_zyx(euler[0], euler[1], euler[2]); }

ModulePose ModulePose::from_transform(const Mat3& rotation, const Vec3& translation) {
  ModulePose pose;
  const double sin_pitch = std::clamp(-rotation(2, 0), -1.0, 1.0);
  pose.euler[1] = std::asin(sin_pitch);
  if (std::abs(sin_pitch) < 1.0 - 1e-12) {
    pose.euler[0] = std::atan2(rotation(1, 0), rotation(0, 0));
    pose.euler[2] = std::atan2(rotation(2, 1), rotation(2, 2));
  } else {
    // Gimbal lock: only yaw - roll (or yaw + roll) is determined; put it all in yaw.
    pose.euler[2] = 0.0;
    pose.euler[0] = std::atan2(-rotation(0, 1), rotation(1, 1));
  }
  pose.translation = translation;
  return pose;
}

ModulePose ModulePose::after(const ModulePose& first) const {
  const Mat3 r = rotation();
  return from_transform(r * first.rotation(), r * first.translation + translation);
}

TensegrityModel::TensegrityModel(std::vector<Node> nodes, std::vector<Member> members,
                                 std::set<int> fixed_nodes,
                                 std::vector<std::vector<int>> active_routes,
                                 std::optional<BuildMeta> meta)
    : nodes_(std::move(nodes)),
      members_(std::move(members)),
      fixed_nodes_(std::move(fixed_nodes)),
      active_routes_(std::move(active_routes)),
      meta_(meta) {
  const int n = node_count();
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].id != i + 1) {
      throw InvalidParameter("node ids must be contiguous from 1; position " +
                             std::to_string(i) + " has id " + std::to_string(nodes_[i].id));
    }
    if (!nodes_[i].position.allFinite()) {
      throw InvalidParameter("node " + std::to_string(nodes_[i].id) + " has a non-finite position");
    }
  }
  auto check_id = [n](int id, const std::string& where) {
    if (id < 1 || id > n) {
      throw UnknownNode(where + " references unknown node " + std::to_string(id));
    }
  };
  for (Member& m : members_) {
    check_id(m.k, "member " + std::to_string(m.id));
    check_id(m.j, "member " + std::to_string(m.id));
    if (m.k == m.j) {
      throw InvalidParameter("member " + std::to_string(m.id) + " connects node " +
                             std::to_string(m.k) + " to itself");
    }
    if (m.k > m.j) std::swap(m.k, m.j);
    if (m.kind == MemberKind::Bar) {
      m.cable_class = CableClass::None;
    } else if (m.cable_class == CableClass::None) {
      throw InvalidParameter("cable " + std::to_string(m.id) + " needs a cable class");
    }
    if (!(m.stiffness > 0.0)) {
      throw InvalidParameter("member " + std::to_string(m.id) + " needs positive stiffness");
    }
  }
  std::stable_partition(members_.begin(), members_.end(),
                        [](const Member& m) { return m.is_cable(); });
  cable_count_ = static_cast<int>(
      std::count_if(members_.begin(), members_.end(), [](const Member& m) { return m.is_cable(); }));
  for (int id : fixed_nodes_) check_id(id, "fixed node set");
  for (std::size_t r = 0; r < active_routes_.size(); ++r) {
    for (int id : active_routes_[r]) check_id(id, "active route " + std::to_string(r + 1));
  }
  if (meta_ && meta_->modules * 4 != n) {
    throw InvalidParameter("module metadata expects " + std::to_string(meta_->modules * 4) +
                           " nodes, model has " + std::to_string(n));
  }
}

Positions TensegrityModel::positions() const {
  Positions p(node_count(), 3);
  for (int i = 0; i < node_count(); ++i) p.row(i) = nodes_[i].position.transpose();
  return p;
}

std::array<int, 4> TensegrityModel::module_nodes(int index) const {
  if (index < 0 || index >= module_count()) {
    throw InvalidParameter("module index " + std::to_string(index) + " out of range");
  }
  const int base = 4 * index;
  return {base + 1, base + 2, base + 3, base + 4};
}

Eigen::VectorXd TensegrityModel::stiffness() const {
  Eigen::VectorXd k(member_count());
  for (int i = 0; i < member_count(); ++i) k[i] = members_[i].stiffness;
  return k;
}

std::array<Vec3, 4> base_tetra_nodes(const TetraParams& params) {
  params.validate();
  const double r = params.radius;
  const double h = params.height;
  const double a = params.alpha;
  return {Vec3(0.0, 0.0, 0.0), Vec3(r * std::sin(0.0), r * std::cos(0.0), h),
          Vec3(r * std::sin(a), r * std::cos(a), h), Vec3(r * std::sin(-a), r * std::cos(-a), h)};
}

Positions apply_pose(const Positions& nodes, const ModulePose& pose) {
  const Mat3 r = pose.rotation();
  Positions out = nodes * r.transpose();
  out.rowwise() += pose.translation.transpose();
  return out;
}

double module_pitch(const BuildMeta& meta) { return meta.height - meta.gap; }

namespace {

void validate_options(const HedraOptions& o) {
  if (o.modules < 1) {
    throw InvalidParameter("module count must be at least 1, got " + std::to_string(o.modules));
  }
  o.tetra.validate();
  if (!(o.joint_gap > 0.0)) {
    throw InvalidParameter("joint gap must be positive");
  }
  if (o.joint_gap >= o.tetra.height) {
    throw InvalidParameter("joint gap must be smaller than the tetrahedron height");
  }
  if (o.active_cables != 3 && o.active_cables != 6) {
    throw InvalidParameter("active cable count must be 3 or 6, got " +
                           std::to_string(o.active_cables));
  }
  if (!(o.cable_stiffness > 0.0) || !(o.bar_stiffness > 0.0)) {
    throw InvalidParameter("stiffness values must be positive");
  }
}

}  // namespace

TensegrityModel build_hedra(const HedraOptions& o) {
  validate_options(o);
  const std::array<Vec3, 4> local = base_tetra_nodes(o.tetra);
  const double pitch = o.tetra.height - o.joint_gap;

  std::vector<Node> nodes;
  for (int i = 0; i < o.modules; ++i) {
    const Mat3 stagger =
        Eigen::AngleAxisd(i * std::numbers::pi / 3.0, Vec3::UnitZ()).toRotationMatrix();
    const Vec3 lift(0.0, 0.0, i * pitch);
    for (const Vec3& p : local) {
      nodes.push_back({static_cast<int>(nodes.size()) + 1, stagger * p + lift});
    }
  }

  std::vector<Member> members;
  auto add = [&members](MemberKind kind, int a, int b, double stiffness, CableClass cls) {
    members.push_back({static_cast<int>(members.size()) + 1, kind, std::min(a, b), std::max(a, b),
                       stiffness, std::nullopt, cls});
  };
  for (int joint = 1; joint < o.modules; ++joint) {
    const int lo = 4 * (joint - 1);  // lower module: apex lo+1, triangle lo+2..lo+4
    const int up = 4 * joint;
    for (int t = 2; t <= 4; ++t) {
      add(MemberKind::Cable, lo + t, up + 1, o.cable_stiffness, CableClass::Saddle);
    }
    // Each lower triangle node pulls on the two upper triangle nodes beside it.
    for (int t = 0; t < 3; ++t) {
      add(MemberKind::Cable, lo + 2 + t, up + 2 + t, o.cable_stiffness, CableClass::Axial);
      add(MemberKind::Cable, lo + 2 + t, up + 2 + (t + 1) % 3, o.cable_stiffness,
          CableClass::Axial);
    }
  }
  for (int i = 0; i < o.modules; ++i) {
    const int b = 4 * i;
    for (auto [a, c] : {std::pair{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}) {
      add(MemberKind::Bar, b + a, b + c, o.bar_stiffness, CableClass::None);
    }
  }

  // Triangle nodes of even modules sit at the base angles, odd modules are
  // turned by 60 degrees; a route zigzags through the nearest node of each.
  std::vector<std::vector<int>> routes;
  for (int family = 0; family < o.active_cables / 3; ++family) {
    for (int cable = 0; cable < 3; ++cable) {
      std::vector<int> route;
      for (int i = 0; i < o.modules; ++i) {
        const int shift = family == 0 ? i / 2 : (i + 1) / 2;
        route.push_back(4 * i + 2 + (cable + shift) % 3);
      }
      routes.push_back(std::move(route));
    }
  }

  BuildMeta meta{o.modules, o.tetra.radius, o.tetra.height, o.joint_gap, o.active_cables};
  return TensegrityModel(std::move(nodes), std::move(members), {1, 2, 3, 4}, std::move(routes),
                         meta);
}

TensegrityModel build_hedra(int modules, const TetraParams& params, double joint_gap,
                            int active_cable_count) {
  HedraOptions o;
  o.modules = modules;
  o.tetra = params;
  o.joint_gap = joint_gap;
  o.active_cables = active_cable_count;
  return build_hedra(o);
}

ConnectivityMatrix connectivity(const TensegrityModel& model) {
  ConnectivityMatrix c;
  c.entries = Eigen::MatrixXd::Zero(model.member_count(), model.node_count());
  c.cable_rows = model.cable_count();
  for (int i = 0; i < model.member_count(); ++i) {
    const Member& m = model.members()[i];
    c.entries(i, m.k - 1) = 1.0;
    c.entries(i, m.j - 1) = -1.0;
  }
  return c;
}

Eigen::VectorXd member_lengths(const TensegrityModel& model, const Positions& config) {
  if (config.rows() != model.node_count()) {
    throw DimensionMismatch("configuration has " + std::to_string(config.rows()) +
                            " rows, model has " + std::to_string(model.node_count()) + " nodes");
  }
  Eigen::VectorXd l(model.member_count());
  for (int i = 0; i < model.member_count(); ++i) {
    const Member& m = model.members()[i];
    l[i] = (config.row(m.j - 1) - config.row(m.k - 1)).norm();
    if (!(l[i] > 0.0)) {
      throw DegenerateGeometry("member " + std::to_string(m.id) + " has coincident endpoints " +
                               std::to_string(m.k) + " and " + std::to_string(m.j));
    }
  }
  return l;
}

Eigen::VectorXd active_lengths(const TensegrityModel& model, const Positions& config) {
  const auto& routes = model.active_routes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(routes.size()));
  for (std::size_t r = 0; r < routes.size(); ++r) {
    for (std::size_t s = 1; s < routes[r].size(); ++s) {
      out[r] += (config.row(routes[r][s] - 1) - config.row(routes[r][s - 1] - 1)).norm();
    }
  }
  return out;
}

Vec3 joint_center(const TensegrityModel& model, const Positions& config, int joint) {
  if (joint < 1 || joint >= model.module_count()) {
    throw InvalidParameter("joint index " + std::to_string(joint) + " out of range");
  }
  const auto lower = model.module_nodes(joint - 1);
  const auto upper = model.module_nodes(joint);
  Vec3 sum = Vec3::Zero();
  for (int t = 1; t <= 3; ++t) {
    sum += 0.5 * (config.row(lower[t] - 1) + config.row(upper[0] - 1)).transpose();
  }
  return sum / 3.0;
}

double route_azimuth(const TensegrityModel& model, const Positions& config, int route) {
  const auto& routes = model.active_routes();
  if (route < 0 || route >= static_cast<int>(routes.size())) {
    throw InvalidParameter("route index " + std::to_string(route) + " out of range");
  }
  Vec3 mean = Vec3::Zero();
  for (int id : routes[route]) mean += config.row(id - 1).transpose();
  return std::atan2(mean.y(), mean.x());
}

}  // namespace hedra
