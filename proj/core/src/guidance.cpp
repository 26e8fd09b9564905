#include "losguide/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace losguide {

std::string_view to_string(GuidanceMethod m) {
  switch (m) {
    case GuidanceMethod::Tpn: return "tpn";
    case GuidanceMethod::PnHeading: return "pn-heading";
    case GuidanceMethod::Hybrid: return "hybrid";
    case GuidanceMethod::LosTrajectory: return "los-traj";
    case GuidanceMethod::ForecastTrajectory: return "forecast-traj";
  }
  return "unknown";
}

std::optional<GuidanceMethod> parse_guidance_method(std::string_view name) {
  for (auto m : {GuidanceMethod::Tpn, GuidanceMethod::PnHeading, GuidanceMethod::Hybrid,
                 GuidanceMethod::LosTrajectory, GuidanceMethod::ForecastTrajectory}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_los_method(GuidanceMethod m) {
  return m == GuidanceMethod::Tpn || m == GuidanceMethod::PnHeading || m == GuidanceMethod::Hybrid;
}

std::string_view to_string(GuidanceMode m) {
  switch (m) {
    case GuidanceMode::Init: return "init";
    case GuidanceMode::PN: return "pn";
    case GuidanceMode::HeadingControl: return "heading";
  }
  return "unknown";
}

void GuidanceParams::validate() const {
  if (!(N > 2.0)) throw std::invalid_argument("navigation gain N must exceed 2");
  if (!(suppression > 0.0 && suppression <= 1.0)) throw std::invalid_argument("suppression must be in (0, 1]");
  if (!(max_accel > 0.0) || !(max_yaw_rate > 0.0)) throw std::invalid_argument("clamps must be positive");
  if (!(init_duration >= 0.0)) throw std::invalid_argument("init_duration must be non-negative");
  if (!(kp_yaw >= 0.0) || !(k_heading > 0.0)) throw std::invalid_argument("heading gains must be positive");
  if (dropout_hold < 0.0 || dropout_decay < 0.0) throw std::invalid_argument("dropout times must be non-negative");
}

double closing_velocity(const Vec3& uav_vel_world, const Vec3& los_world_unit) {
  return uav_vel_world.dot(los_world_unit);
}

std::optional<double> closing_velocity_from_ranges(const std::vector<RangeObservation>& obs,
                                                   std::size_t min_samples) {
  if (obs.size() < std::max<std::size_t>(min_samples, 2)) return std::nullopt;
  double t_mean = 0.0, r_mean = 0.0;
  for (const auto& o : obs) {
    t_mean += o.t;
    r_mean += o.range;
  }
  t_mean /= static_cast<double>(obs.size());
  r_mean /= static_cast<double>(obs.size());
  double stt = 0.0, str = 0.0;
  for (const auto& o : obs) {
    stt += (o.t - t_mean) * (o.t - t_mean);
    str += (o.t - t_mean) * (o.range - r_mean);
  }
  if (!(stt > 0.0)) return std::nullopt;
  return -str / stt;
}

Vec3 los_accel_body(const LosSample& los, double closing_vel, const GuidanceParams& p, const CameraMount& mount) {
  if (!los.valid_rate) return Vec3::Zero();
  const Vec3 a_cam = p.N * std::max(closing_vel, 0.0) * los.phi_dot * los.n_unit;
  return camera_to_body(a_cam, mount);
}

GuidanceCommand clamp_command(GuidanceCommand cmd, const GuidanceParams& p) {
  const double a = cmd.accel_body.norm();
  if (a > p.max_accel) cmd.accel_body *= p.max_accel / a;
  cmd.yaw_rate = std::clamp(cmd.yaw_rate, -p.max_yaw_rate, p.max_yaw_rate);
  return cmd;
}

GuidanceCommand tpn_command(const LosSample& los, double closing_vel, const GuidanceParams& p,
                            const CameraMount& mount) {
  GuidanceCommand cmd;
  cmd.mode = GuidanceMode::PN;
  cmd.accel_body = los_accel_body(los, closing_vel, p, mount);
  return clamp_command(cmd, p);
}

GuidanceCommand pn_heading_command(const LosSample& los, const Vec3& a_los_body, const GuidanceParams& p,
                                   const CameraMount& mount) {
  const double heading = body_heading(camera_to_body(los.r, mount));
  GuidanceCommand cmd;
  cmd.mode = GuidanceMode::HeadingControl;
  cmd.accel_body = Vec3(a_los_body.x(), 0.0, a_los_body.z());
  cmd.yaw_rate = p.kp_yaw * heading;
  return clamp_command(cmd, p);
}

GuidanceCommand hybrid_command(const LosSample& los, const Vec3& a_los_body, const GuidanceParams& p,
                               const CameraMount& mount) {
  const double heading = body_heading(camera_to_body(los.r, mount));
  GuidanceCommand cmd;
  if (std::abs(heading) < p.k_heading) {
    cmd.mode = GuidanceMode::PN;
    cmd.accel_body = a_los_body;
    cmd.yaw_rate = p.suppression * p.kp_yaw * heading;
  } else {
    cmd.mode = GuidanceMode::HeadingControl;
    cmd.accel_body = Vec3(a_los_body.x(), p.suppression * a_los_body.y(), 0.0);
    cmd.yaw_rate = p.kp_yaw * heading;
  }
  return clamp_command(cmd, p);
}

Vec3 init_guidance(const std::optional<LosSample>& los, double desired_speed, const Pose& pose,
                   const CameraMount& mount) {
  if (!los) return Vec3::Zero();
  return desired_speed * camera_to_world(los->r, pose, mount).normalized();
}

bool init_complete(const GuidanceState& state, const GuidanceParams& p) {
  return state.elapsed >= p.init_duration;
}

GuidanceCommand dropout_command(const GuidanceCommand& last, double time_since_detection, const GuidanceParams& p) {
  if (time_since_detection <= p.dropout_hold) return last;
  GuidanceCommand out = last;
  const double fade = time_since_detection - p.dropout_hold;
  const double scale = p.dropout_decay > 0.0 ? std::max(0.0, 1.0 - fade / p.dropout_decay) : 0.0;
  out.accel_body *= scale;
  out.yaw_rate *= scale;
  return out;
}

}  // namespace losguide
