#include "losguide/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace losguide {

Trajectory::Trajectory(std::vector<Waypoint> waypoints) : wps_(std::move(waypoints)) {
  if (wps_.empty()) throw std::invalid_argument("trajectory needs at least one waypoint");
  for (std::size_t i = 1; i < wps_.size(); ++i) {
    if (!(wps_[i].t > wps_[i - 1].t)) throw std::invalid_argument("trajectory timestamps must increase");
  }
}

Waypoint Trajectory::sample(double t) const {
  if (t <= wps_.front().t) return wps_.front();
  if (t >= wps_.back().t) return wps_.back();
  const auto it = std::upper_bound(wps_.begin(), wps_.end(), t,
                                   [](double value, const Waypoint& w) { return value < w.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  Waypoint out;
  out.t = t;
  out.position = a.position + s * (b.position - a.position);
  out.velocity = a.velocity + s * (b.velocity - a.velocity);
  out.speed = a.speed + s * (b.speed - a.speed);
  out.yaw = wrap_angle(a.yaw + s * wrap_angle(b.yaw - a.yaw));
  return out;
}

Trajectory Trajectory::shifted(double offset) const {
  auto wps = wps_;
  for (auto& w : wps) w.t += offset;
  return Trajectory(std::move(wps));
}

double yaw_from_velocity(const Vec3& v, double fallback) {
  if (std::hypot(v.x(), v.y()) < 1e-6) return fallback;
  return std::atan2(v.y(), v.x());
}

Trajectory gen_los_accel_trajectory(const Waypoint& start, const Vec3& v0, const Vec3& accel, double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("trajectory horizon and step must be positive");
  const auto steps = static_cast<int>(std::llround(T / dt));
  std::vector<Waypoint> wps;
  wps.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= std::max(steps, 1); ++i) {
    const double t = std::min(i * dt, T);
    Waypoint w;
    w.t = t;
    w.position = start.position + v0 * t + 0.5 * accel * t * t;
    w.velocity = v0 + accel * t;
    w.speed = w.velocity.norm();
    w.yaw = yaw_from_velocity(w.velocity, start.yaw);
    if (!wps.empty() && !(t > wps.back().t)) break;
    wps.push_back(w);
  }
  return Trajectory(std::move(wps));
}

std::optional<Forecast> forecast_target(const ForecastInputs& in, double eps) {
  if (!(in.t1 > in.t0)) return std::nullopt;
  const double closing = in.uav_vel.dot(in.los1);
  if (closing <= eps) return std::nullopt;
  Forecast f;
  f.v_target = (in.d1 * in.los1 - in.d0 * in.los0) / (in.t1 - in.t0);
  f.t_collision = in.d1 / closing;
  f.p_collision = f.v_target * f.t_collision + in.d1 * in.los1;
  return f;
}

Trajectory gen_forecast_trajectory(const Waypoint& start, const Vec3& p_collision, double t_collision, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory step must be positive");
  const Vec3 delta = p_collision - start.position;
  const double dist = delta.norm();
  if (dist < 1e-9) {
    Waypoint hold = start;
    hold.t = 0.0;
    hold.speed = 0.0;
    hold.velocity = Vec3::Zero();
    return Trajectory({hold});
  }
  if (!(t_collision > dt)) throw std::invalid_argument("collision time must exceed the step");

  const Vec3 vel = delta / t_collision;
  const double yaw = yaw_from_velocity(vel, start.yaw);
  const auto steps = static_cast<int>(std::ceil(t_collision / dt - 1e-9));
  std::vector<Waypoint> wps;
  wps.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = std::min(i * dt, t_collision);
    if (!wps.empty() && !(t > wps.back().t)) break;
    Waypoint w;
    w.t = t;
    w.position = start.position + vel * t;
    w.velocity = vel;
    w.speed = dist / t_collision;
    w.yaw = yaw;
    wps.push_back(w);
  }
  return Trajectory(std::move(wps));
}

double lookahead_time(double f_replan, double buffer) { return 1.0 / f_replan + buffer; }

TrajectoryCursor cursor_step(const Trajectory& traj, double now, double f_replan, double buffer,
                             const std::optional<TrajectoryCursor>& previous) {
  if (traj.empty()) throw std::invalid_argument("cursor needs a non-empty trajectory");
  if (!(f_replan > 0.0)) throw std::invalid_argument("replan frequency must be positive");
  TrajectoryCursor c;
  double t = std::clamp(now, traj.start_time(), traj.end_time());
  if (previous) t = std::max(t, std::min(previous->progress, traj.end_time()));
  c.progress = t;
  c.lookahead_time = lookahead_time(f_replan, buffer);
  c.tracking_point = traj.sample(t);
  c.lookahead_point = traj.sample(std::min(t + c.lookahead_time, traj.end_time()));
  return c;
}

Trajectory stitch(const Trajectory& old_traj, const Trajectory& new_traj, double stitch_time, double tol) {
  if (old_traj.empty()) return new_traj.shifted(stitch_time - new_traj.start_time());
  const Waypoint at = old_traj.sample(stitch_time);
  if ((at.position - new_traj.front().position).norm() > tol)
    throw std::invalid_argument("new trajectory does not start at the stitch point");

  std::vector<Waypoint> wps;
  for (const auto& w : old_traj.waypoints()) {
    if (w.t < stitch_time) wps.push_back(w);
  }
  const double offset = stitch_time - new_traj.start_time();
  for (const auto& w : new_traj.waypoints()) {
    Waypoint s = w;
    s.t += offset;
    if (!wps.empty() && !(s.t > wps.back().t)) continue;
    wps.push_back(s);
  }
  return Trajectory(std::move(wps));
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,x,y,z,yaw,speed\n";
  os << std::setprecision(9);
  for (const auto& w : traj.waypoints()) {
    os << w.t << ',' << w.position.x() << ',' << w.position.y() << ',' << w.position.z() << ',' << w.yaw << ','
       << w.speed << '\n';
  }
}

}  // namespace losguide
