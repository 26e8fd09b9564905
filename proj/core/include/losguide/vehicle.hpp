#pragma once

#include "losguide/geometry.hpp"
#include "losguide/trajectory.hpp"

#include <array>

namespace losguide {

struct UavState {
  Pose pose;
  Vec3 angular_rates = Vec3::Zero();  ///< roll, pitch, yaw rates, rad/s
  double clock = 0.0;
};

struct AttitudeCommand {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw_rate = 0.0;
  double thrust = 0.0;  ///< normalised, 0..1
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double i_limit = 0.0;  ///< clamp on the integral term's contribution
};

/// Scalar PID on the error signal. The derivative is a backward difference
/// and is zero on the first step.
class Pid {
 public:
  Pid() = default;
  explicit Pid(PidGains g) : g_(g) {}

  double step(double error, double dt);
  void reset();
  const PidGains& gains() const { return g_; }

 private:
  PidGains g_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool primed_ = false;
};

struct ControllerGains {
  std::array<PidGains, 3> position{{{1.2, 0.0, 0.0, 0.0}, {1.2, 0.0, 0.0, 0.0}, {1.5, 0.0, 0.0, 0.0}}};
  std::array<PidGains, 3> velocity{{{2.5, 0.6, 0.0, 3.0}, {2.5, 0.6, 0.0, 3.0}, {3.0, 0.8, 0.0, 3.0}}};
  double feedforward_weight = 1.0;

  void validate() const;
};

struct VehicleParams {
  double tau_att = 0.15;                  ///< attitude time constant, s
  double tilt_limit = deg2rad(35.0);      ///< rad
  double max_thrust_accel = 2.0 * kGravity;
  double drag = 0.3;                      ///< linear drag, 1/s
  double max_yaw_rate = 2.0;              ///< rad/s
  double min_vertical_accel = 0.1 * kGravity;

  double hover_thrust() const { return kGravity / max_thrust_accel; }
  /// Zero attitude lag, no drag and no tilt limit.
  static VehicleParams ideal();
  void validate() const;
};

/// Position PID plus velocity feedforward -> world velocity reference.
class PoseController {
 public:
  explicit PoseController(const ControllerGains& gains = {});
  Vec3 step(const Waypoint& tracking, const Vec3& ff_vel, const UavState& state, double dt);
  void reset();

 private:
  std::array<Pid, 3> pid_;
  double ff_weight_;
};

/// Velocity PID plus acceleration feedforward and gravity compensation,
/// decomposed into a tilt/thrust command in the current yaw frame.
class VelocityController {
 public:
  VelocityController(const ControllerGains& gains = {}, const VehicleParams& vehicle = {});
  AttitudeCommand step(const Vec3& v_ref, const Vec3& a_ff, double yaw_rate, const UavState& state, double dt);
  void reset();
  const Vec3& last_accel_demand() const { return last_demand_; }

 private:
  std::array<Pid, 3> pid_;
  VehicleParams vehicle_;
  Vec3 last_demand_ = Vec3::Zero();
};

/// Tilt and thrust realising a world acceleration demand. When the tilt
/// limit binds the horizontal part is scaled down and the vertical part kept.
AttitudeCommand accel_to_attitude(const Vec3& a_des_world, double yaw, double yaw_rate, const VehicleParams& p);

/// Acceleration produced by a given attitude/thrust, drag excluded.
Vec3 thrust_accel_world(const Attitude& att, double thrust, const VehicleParams& p);

/// First-order attitude lag, integrated yaw, thrust + gravity + linear drag,
/// semi-implicit Euler. dt must lie in (0, 0.02].
UavState dynamics_step(const UavState& state, const AttitudeCommand& cmd, const VehicleParams& p, double dt);

/// Point mass realising `accel_world` exactly, attitude kept level, yaw
/// integrated. Used for ideal-dynamics runs.
UavState point_mass_step(const UavState& state, const Vec3& accel_world, double yaw_rate, double dt);

}  // namespace losguide
