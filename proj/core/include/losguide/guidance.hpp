#pragma once

#include "losguide/geometry.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace losguide {

enum class GuidanceMethod { Tpn, PnHeading, Hybrid, LosTrajectory, ForecastTrajectory };

std::string_view to_string(GuidanceMethod m);
std::optional<GuidanceMethod> parse_guidance_method(std::string_view name);
/// True for the acceleration-command (LOS guidance) class.
bool is_los_method(GuidanceMethod m);

enum class GuidanceMode { Init, PN, HeadingControl };

std::string_view to_string(GuidanceMode m);

struct GuidanceParams {
  double N = 3.0;
  double kp_yaw = 1.5;        ///< 1/s
  double k_heading = 0.35;    ///< rad
  double suppression = 0.2;
  double init_duration = 2.0;  ///< s
  double max_accel = 8.0;      ///< m/s^2
  double max_yaw_rate = 1.5;   ///< rad/s
  double dropout_hold = 0.2;   ///< s, last command held after a lost detection
  double dropout_decay = 0.2;  ///< s, linear ramp to zero after the hold

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Body-frame (x forward, y left, z up) acceleration and yaw-rate demand.
struct GuidanceCommand {
  Vec3 accel_body = Vec3::Zero();
  double yaw_rate = 0.0;
  GuidanceMode mode = GuidanceMode::Init;
};

struct GuidanceState {
  std::optional<LosSample> prev_los;
  double elapsed = 0.0;
  GuidanceMode last_mode = GuidanceMode::Init;
};

/// Own velocity projected on the LOS; target motion is unobservable here.
double closing_velocity(const Vec3& uav_vel_world, const Vec3& los_world_unit);

struct RangeObservation {
  double t = 0.0;
  double range = 0.0;
};

/// Minus the least-squares slope of range against time, i.e. the closing
/// velocity seen through a sequence of depth estimates. nullopt with fewer
/// than `min_samples` observations or no spread in time.
std::optional<double> closing_velocity_from_ranges(const std::vector<RangeObservation>& obs,
                                                   std::size_t min_samples = 6);

/// N * max(Vc, 0) * phi_dot * 1_n in body axes, unclamped. Zero when the rate is invalid.
Vec3 los_accel_body(const LosSample& los, double closing_vel, const GuidanceParams& p,
                    const CameraMount& mount = {});

GuidanceCommand clamp_command(GuidanceCommand cmd, const GuidanceParams& p);

GuidanceCommand tpn_command(const LosSample& los, double closing_vel, const GuidanceParams& p,
                            const CameraMount& mount = {});

/// PN on the body x/z axes, lateral handled through heading.
GuidanceCommand pn_heading_command(const LosSample& los, const Vec3& a_los_body, const GuidanceParams& p,
                                   const CameraMount& mount = {});

GuidanceCommand hybrid_command(const LosSample& los, const Vec3& a_los_body, const GuidanceParams& p,
                               const CameraMount& mount = {});

/// Velocity along the current LOS during the initial window; zero without a detection.
Vec3 init_guidance(const std::optional<LosSample>& los, double desired_speed, const Pose& pose,
                   const CameraMount& mount = {});

bool init_complete(const GuidanceState& state, const GuidanceParams& p);

/// Command applied while the detection is missing: the last command for
/// `dropout_hold`, then a linear fade to zero.
GuidanceCommand dropout_command(const GuidanceCommand& last, double time_since_detection,
                                const GuidanceParams& p);

}  // namespace losguide
