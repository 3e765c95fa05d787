#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace hedra {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Node positions, one row per node (row i holds node id i+1).
/// The three columns are the nodal coordinate vectors x, y, z.
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr double kDefaultCableStiffness = 10000.0;  // N/m
inline constexpr double kDefaultBarStiffness = 1.0e6;      // N/m
inline constexpr double kDefaultJointGap = 0.02;           // m

enum class MemberKind { Cable, Bar };
enum class CableClass { Saddle, Axial, ActiveSegment, None };

struct Node {
  int id = 0;
  Vec3 position = Vec3::Zero();
};

struct Member {
  int id = 0;
  MemberKind kind = MemberKind::Cable;
  int k = 0;  // smaller endpoint id
  int j = 0;  // larger endpoint id
  double stiffness = kDefaultCableStiffness;
  std::optional<double> rest_length;
  CableClass cable_class = CableClass::None;

  bool is_cable() const { return kind == MemberKind::Cable; }
};

struct TetraParams {
  double radius = 0.1;
  double height = 0.15;
  double alpha = 2.0 * std::numbers::pi / 3.0;

  void validate() const;
};

/// Parameters recorded by build_hedra so that module-level operations
/// (poses, joint centers, traces) can be reconstructed from a model file.
struct BuildMeta {
  int modules = 1;
  double radius = 0.1;
  double height = 0.15;
  double gap = kDefaultJointGap;
  int active_cables = 3;
};

/// Rigid transform of one tetrahedral module: x' = R(yaw, pitch, roll) x + t.
///
/// Angles follow the intrinsic Z-Y-X convention, R = Rz(yaw) Ry(pitch) Rx(roll).
/// For row-stacked node matrices this is S' = S R^T + 1 t^T.
struct ModulePose {
  Vec3 euler = Vec3::Zero();  // (yaw, pitch, roll), radians
  Vec3 translation = Vec3::Zero();

  static ModulePose identity() { return {}; }
  /// Recovers Z-Y-X angles from a rotation matrix.
  static ModulePose from_transform(const Mat3& rotation, const Vec3& translation);

  Mat3 rotation() const;
  Vec3 apply(const Vec3& p) const { return rotation() * p + translation; }
  /// Pose equivalent to applying `first`, then `*this`.
  ModulePose after(const ModulePose& first) const;
};

Mat3 rotation_zyx(double yaw, double pitch, double roll);

class TensegrityModel {
 public:
  TensegrityModel() = default;
  /// Validates the topology and reorders members so that all cables
  /// precede all bars (relative order within each kind is kept).
  TensegrityModel(std::vector<Node> nodes, std::vector<Member> members,
                  std::set<int> fixed_nodes,
                  std::vector<std::vector<int>> active_routes,
                  std::optional<BuildMeta> meta = std::nullopt);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Member>& members() const { return members_; }
  const std::set<int>& fixed_nodes() const { return fixed_nodes_; }
  const std::vector<std::vector<int>>& active_routes() const { return active_routes_; }
  const std::optional<BuildMeta>& meta() const { return meta_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int member_count() const { return static_cast<int>(members_.size()); }
  int cable_count() const { return cable_count_; }
  int bar_count() const { return member_count() - cable_count_; }
  int module_count() const { return meta_ ? meta_->modules : 0; }
  bool is_fixed(int node_id) const { return fixed_nodes_.contains(node_id); }

  /// Positions stored in the model (the as-built configuration).
  Positions positions() const;

  /// Node ids of module `index` (0-based): apex then the three triangle nodes.
  std::array<int, 4> module_nodes(int index) const;

  /// Per-member stiffness, in member order.
  Eigen::VectorXd stiffness() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Member> members_;
  std::set<int> fixed_nodes_;
  std::vector<std::vector<int>> active_routes_;
  std::optional<BuildMeta> meta_;
  int cable_count_ = 0;
};

/// Incidence matrix with cables in the first `cable_rows` rows.
struct ConnectivityMatrix {
  Eigen::MatrixXd entries;
  int cable_rows = 0;

  int bar_rows() const { return static_cast<int>(entries.rows()) - cable_rows; }
  Eigen::MatrixXd cables() const { return entries.topRows(cable_rows); }
  Eigen::MatrixXd bars() const { return entries.bottomRows(bar_rows()); }
};

/// Apex at the local origin, then the three triangle nodes at height h.
std::array<Vec3, 4> base_tetra_nodes(const TetraParams& params);

Positions apply_pose(const Positions& nodes, const ModulePose& pose);

struct HedraOptions {
  int modules = 5;
  TetraParams tetra;
  double joint_gap = kDefaultJointGap;
  int active_cables = 3;
  double cable_stiffness = kDefaultCableStiffness;
  double bar_stiffness = kDefaultBarStiffness;
};

/// Stacks `modules` tetrahedra along +z joined by saddle/axial cable joints.
///
/// Module i is the base tetrahedron turned by i * 60 degrees about z and
/// lifted by i * (h - gap), so each upper apex sits `gap` below the lower
/// triangle plane. Module 0 is grounded.
TensegrityModel build_hedra(const HedraOptions& options);
TensegrityModel build_hedra(int modules, const TetraParams& params, double joint_gap,
                            int active_cable_count);

ConnectivityMatrix connectivity(const TensegrityModel& model);

/// Current member lengths; throws DegenerateGeometry on a zero-length member.
Eigen::VectorXd member_lengths(const TensegrityModel& model, const Positions& config);

/// Sum of straight segment lengths along each active route.
Eigen::VectorXd active_lengths(const TensegrityModel& model, const Positions& config);

/// Vertical distance between consecutive modules.
double module_pitch(const BuildMeta& meta);

/// Centroid of the saddle-cable midpoints of joint `joint` (1-based; joint j
/// connects module j-1 to module j), evaluated on `config`.
Vec3 joint_center(const TensegrityModel& model, const Positions& config, int joint);

/// Horizontal direction (radians from +x) of the route's mean viapoint.
double route_azimuth(const TensegrityModel& model, const Positions& config, int route);

}  // namespace hedra
