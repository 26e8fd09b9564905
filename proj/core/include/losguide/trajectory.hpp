#pragma once

#include "losguide/geometry.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace losguide {

/// Timed waypoint. `velocity` carries the direction that `speed` alone drops;
/// the pose controller uses it as feedforward.
struct Waypoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double speed = 0.0;
  Vec3 velocity = Vec3::Zero();
};

/// Waypoints with strictly increasing timestamps. A single waypoint is a hold.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Waypoint> waypoints);

  const std::vector<Waypoint>& waypoints() const { return wps_; }
  bool empty() const { return wps_.empty(); }
  std::size_t size() const { return wps_.size(); }
  const Waypoint& front() const { return wps_.front(); }
  const Waypoint& back() const { return wps_.back(); }
  double start_time() const { return wps_.front().t; }
  double end_time() const { return wps_.back().t; }
  double duration() const { return end_time() - start_time(); }

  /// Linear interpolation of position and velocity, clamped to the ends.
  Waypoint sample(double t) const;

  /// Copy with every timestamp shifted by `offset`.
  Trajectory shifted(double offset) const;

 private:
  std::vector<Waypoint> wps_;
};

struct TrajectoryCursor {
  Waypoint tracking_point;
  Waypoint lookahead_point;
  double lookahead_time = 0.0;
  double progress = 0.0;  ///< monotone trajectory time of the tracking point
};

struct ForecastInputs {
  double d0 = 0.0;
  double d1 = 0.0;
  Vec3 los0 = Vec3::UnitZ();
  Vec3 los1 = Vec3::UnitZ();
  double t0 = 0.0;
  double t1 = 0.0;
  Vec3 uav_vel = Vec3::Zero();
};

struct Forecast {
  Vec3 v_target = Vec3::Zero();
  double t_collision = 0.0;
  Vec3 p_collision = Vec3::Zero();
};

inline constexpr double kForecastMinClosing = 0.1;  // m/s

/// Yaw facing the horizontal velocity, or `fallback` when nearly vertical/still.
double yaw_from_velocity(const Vec3& v, double fallback);

/// Constant-acceleration trajectory from `start`, samples at 0, dt, ..., T.
Trajectory gen_los_accel_trajectory(const Waypoint& start, const Vec3& v0, const Vec3& accel, double T, double dt);

/// Constant-velocity target forecast. Both observations must be expressed in
/// the same frame; nullopt when the closing component along los1 is <= eps.
std::optional<Forecast> forecast_target(const ForecastInputs& in, double eps = kForecastMinClosing);

/// Straight line to `p_collision` arriving at `t_collision`.
Trajectory gen_forecast_trajectory(const Waypoint& start, const Vec3& p_collision, double t_collision, double dt);

double lookahead_time(double f_replan, double buffer);

/// Advances the cursor to `now` (never backwards) and places the lookahead
/// point 1/f + buffer ahead of the tracking point, clamped to the end.
TrajectoryCursor cursor_step(const Trajectory& traj, double now, double f_replan, double buffer,
                             const std::optional<TrajectoryCursor>& previous = std::nullopt);

/// Truncates `old_traj` at `stitch_time` and appends `new_traj` re-based to
/// start there. Throws std::invalid_argument if the two are not continuous.
Trajectory stitch(const Trajectory& old_traj, const Trajectory& new_traj, double stitch_time, double tol = 1e-6);

/// CSV with header t,x,y,z,yaw,speed.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace losguide
