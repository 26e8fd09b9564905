#pragma once

#include "losguide/geometry.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace losguide {

enum class PathKind { Straight, Figure8, Knot };

std::string_view to_string(PathKind k);
std::optional<PathKind> parse_path_kind(std::string_view name);

/// Target path description. World frame is the pursuer's start frame: the
/// UAV sits at the origin looking down +x. Randomised quantities are drawn
/// from `seed`; the explicit overrides pin them for scripted scenarios.
struct TargetPathSpec {
  PathKind kind = PathKind::Straight;
  double speed = 1.0;  ///< m/s; a straight path may be stationary (0)
  std::uint64_t seed = 0;
  double radius = 0.5;

  // Straight: starts near one FOV edge and crosses in front of the UAV.
  double straight_range_min = 12.0;
  double straight_range_max = 18.0;
  double straight_edge_fraction = 0.8;  ///< of the horizontal half FOV
  double half_hfov = deg2rad(52.5);
  double slope_max = deg2rad(15.0);
  std::optional<Vec3> start;
  std::optional<Vec3> direction;

  // Figure-8: Gerono lemniscate spanning length x height in its own plane
  // (local x along the length, local z up), yawed by base_yaw then tilted.
  double fig8_length = 10.0;
  double fig8_height = 6.0;
  double base_yaw = 0.5 * kPi;
  double tilt_max = deg2rad(30.0);
  Vec3 fig8_center_min = Vec3(12.0, -2.0, -1.0);
  Vec3 fig8_center_max = Vec3(18.0, 2.0, 1.0);

  // Knot: trefoil scaled to knot_size^3 centred in the region box.
  double knot_size = 2.0;
  Vec3 region_center = Vec3(13.0, 0.0, 0.0);  ///< x is depth ahead of the UAV
  Vec3 region_extent = Vec3(10.0, 20.0, 10.0);

  std::optional<Vec3> center;
  std::optional<double> tilt_angle;  ///< overrides the random tilt magnitude (rad)
  bool random_phase = true;
  std::optional<double> phase;  ///< starting arc-length fraction in [0, 1), overrides random_phase
  /// Reverses the direction of travel around periodic paths.
  bool reverse = false;

  void validate() const;
};

struct TargetState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double radius = 0.5;
};

/// Immutable, time-parametrised target path with constant speed along the curve.
class TargetPath {
 public:
  static constexpr int kArcSamples = 4096;

  PathKind kind() const { return kind_; }
  double speed() const { return speed_; }
  double radius() const { return radius_; }
  /// Curve length for periodic kinds, 0 for straight paths.
  double length() const { return length_; }
  /// Traversal period; infinite for straight (and stationary) paths.
  double period() const;
  const Mat3& orientation() const { return rotation_; }
  const Vec3& center() const { return center_; }

  TargetState sample(double t) const;
  /// State at arc length s along the curve, moving at `speed`.
  TargetState sample_arc(double s, double speed) const;
  /// Axis-aligned bounds of the positions visited over [0, horizon].
  std::pair<Vec3, Vec3> bounds(double horizon) const;

  friend TargetPath build_path(const TargetPathSpec& spec);

 private:
  Vec3 local_point(double theta) const;
  Vec3 local_tangent(double theta) const;
  double theta_at(double s) const;

  PathKind kind_ = PathKind::Straight;
  double speed_ = 0.0;
  double radius_ = 0.5;
  Vec3 start_ = Vec3::Zero();
  Vec3 direction_ = Vec3::UnitY();
  Vec3 center_ = Vec3::Zero();
  Mat3 rotation_ = Mat3::Identity();
  Vec3 scale_ = Vec3::Ones();
  Vec3 offset_ = Vec3::Zero();  ///< local offset re-centring the scaled curve
  double phase_s_ = 0.0;
  double sign_ = 1.0;
  double length_ = 0.0;
  std::vector<double> arc_;  ///< cumulative arc length at theta_k = 2 pi k / N
};

TargetPath build_path(const TargetPathSpec& spec);

/// CSV preview with header t,x,y,z.
void write_path_csv(const TargetPath& path, double duration, double dt, std::ostream& os);

}  // namespace losguide
