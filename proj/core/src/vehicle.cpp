#include "losguide/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losguide {

double Pid::step(double error, double dt) {
  integral_ += error * dt;
  double i_term = g_.ki * integral_;
  if (g_.ki > 0.0 && g_.i_limit > 0.0) {
    i_term = std::clamp(i_term, -g_.i_limit, g_.i_limit);
    integral_ = i_term / g_.ki;
  }
  const double d_term = primed_ ? g_.kd * (error - prev_error_) / dt : 0.0;
  prev_error_ = error;
  primed_ = true;
  return g_.kp * error + i_term + d_term;
}

void Pid::reset() {
  integral_ = 0.0;
  prev_error_ = 0.0;
  primed_ = false;
}

void ControllerGains::validate() const {
  for (const auto& set : {position, velocity}) {
    for (const auto& g : set) {
      if (!(g.kp > 0.0)) throw std::invalid_argument("proportional gains must be positive");
      if (!std::isfinite(g.i_limit) || g.ki < 0.0 || g.kd < 0.0)
        throw std::invalid_argument("integral/derivative settings must be finite and non-negative");
    }
  }
}

VehicleParams VehicleParams::ideal() {
  VehicleParams p;
  p.tau_att = 0.0;
  p.drag = 0.0;
  p.tilt_limit = deg2rad(89.0);
  p.max_thrust_accel = 10.0 * kGravity;
  p.max_yaw_rate = 10.0;
  return p;
}

void VehicleParams::validate() const {
  if (tau_att < 0.0) throw std::invalid_argument("tau_att must be non-negative");
  if (!(tilt_limit > 0.0 && tilt_limit < 0.5 * kPi)) throw std::invalid_argument("tilt limit must be in (0, 90) deg");
  if (!(max_thrust_accel > kGravity)) throw std::invalid_argument("max thrust must exceed gravity");
  if (drag < 0.0) throw std::invalid_argument("drag must be non-negative");
  if (!(max_yaw_rate > 0.0)) throw std::invalid_argument("yaw rate limit must be positive");
}

PoseController::PoseController(const ControllerGains& gains) : ff_weight_(gains.feedforward_weight) {
  for (std::size_t i = 0; i < 3; ++i) pid_[i] = Pid(gains.position[i]);
}

Vec3 PoseController::step(const Waypoint& tracking, const Vec3& ff_vel, const UavState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("controller dt must be positive");
  const Vec3 err = tracking.position - state.pose.position;
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = pid_[static_cast<std::size_t>(i)].step(err[i], dt);
  return out + ff_weight_ * ff_vel;
}

void PoseController::reset() {
  for (auto& p : pid_) p.reset();
}

VelocityController::VelocityController(const ControllerGains& gains, const VehicleParams& vehicle)
    : vehicle_(vehicle) {
  for (std::size_t i = 0; i < 3; ++i) pid_[i] = Pid(gains.velocity[i]);
}

AttitudeCommand VelocityController::step(const Vec3& v_ref, const Vec3& a_ff, double yaw_rate,
                                         const UavState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("controller dt must be positive");
  const Vec3 err = v_ref - state.pose.velocity;
  Vec3 a_des;
  for (int i = 0; i < 3; ++i) a_des[i] = pid_[static_cast<std::size_t>(i)].step(err[i], dt);
  a_des += a_ff;
  last_demand_ = a_des;
  return accel_to_attitude(a_des, state.pose.attitude.yaw, yaw_rate, vehicle_);
}

void VelocityController::reset() {
  for (auto& p : pid_) p.reset();
  last_demand_.setZero();
}

AttitudeCommand accel_to_attitude(const Vec3& a_des_world, double yaw, double yaw_rate, const VehicleParams& p) {
  // Specific force in the yaw frame.
  Vec3 f = rotation_z(-yaw) * (a_des_world + Vec3(0.0, 0.0, kGravity));
  f.z() = std::max(f.z(), p.min_vertical_accel);

  const double horiz = std::hypot(f.x(), f.y());
  const double max_horiz = f.z() * std::tan(p.tilt_limit);
  if (horiz > max_horiz) {
    const double s = max_horiz / horiz;
    f.x() *= s;
    f.y() *= s;
  }

  const double mag = f.norm();
  AttitudeCommand cmd;
  cmd.roll = std::asin(std::clamp(-f.y() / mag, -1.0, 1.0));
  cmd.pitch = std::atan2(f.x(), f.z());
  cmd.yaw_rate = yaw_rate;
  cmd.thrust = std::clamp(mag / p.max_thrust_accel, 0.0, 1.0);
  return cmd;
}

Vec3 thrust_accel_world(const Attitude& att, double thrust, const VehicleParams& p) {
  return body_to_world_rotation(att) * Vec3(0.0, 0.0, thrust * p.max_thrust_accel);
}

UavState dynamics_step(const UavState& state, const AttitudeCommand& cmd, const VehicleParams& p, double dt) {
  if (!(dt > 0.0 && dt <= 0.02 + 1e-12)) throw std::invalid_argument("dynamics dt must be in (0, 0.02]");
  UavState next = state;
  Attitude& att = next.pose.attitude;

  const double roll_cmd = std::clamp(cmd.roll, -p.tilt_limit, p.tilt_limit);
  const double pitch_cmd = std::clamp(cmd.pitch, -p.tilt_limit, p.tilt_limit);
  // Exact discretisation of the first-order lag.
  const double blend = p.tau_att > 0.0 ? 1.0 - std::exp(-dt / p.tau_att) : 1.0;
  att.roll += (roll_cmd - att.roll) * blend;
  att.pitch += (pitch_cmd - att.pitch) * blend;
  const double yaw_rate = std::clamp(cmd.yaw_rate, -p.max_yaw_rate, p.max_yaw_rate);
  att.yaw = wrap_angle(att.yaw + yaw_rate * dt);

  next.angular_rates = Vec3((att.roll - state.pose.attitude.roll) / dt,
                            (att.pitch - state.pose.attitude.pitch) / dt, yaw_rate);

  const double thrust = std::clamp(cmd.thrust, 0.0, 1.0);
  const Vec3 accel = thrust_accel_world(att, thrust, p) - Vec3(0.0, 0.0, kGravity) - p.drag * state.pose.velocity;
  next.pose.velocity = state.pose.velocity + accel * dt;
  next.pose.position = state.pose.position + next.pose.velocity * dt;
  next.clock = state.clock + dt;
  return next;
}

UavState point_mass_step(const UavState& state, const Vec3& accel_world, double yaw_rate, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  UavState next = state;
  next.pose.attitude.roll = 0.0;
  next.pose.attitude.pitch = 0.0;
  next.pose.attitude.yaw = wrap_angle(state.pose.attitude.yaw + yaw_rate * dt);
  next.angular_rates = Vec3(0.0, 0.0, yaw_rate);
  next.pose.velocity = state.pose.velocity + accel_world * dt;
  next.pose.position = state.pose.position + next.pose.velocity * dt;
  next.clock = state.clock + dt;
  return next;
}

}  // namespace losguide
