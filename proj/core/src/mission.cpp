#include "losguide/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <stdexcept>

namespace losguide {

void Arena::validate() const {
  if (!(length > 0.0 && width > 0.0 && ceiling > 0.0)) throw std::invalid_argument("arena extents must be positive");
}

void ValidityGate::validate() const {
  if (!(min_bbox_area_fraction >= 0.0 && min_bbox_area_fraction < 1.0) ||
      !(bottom_exclusion_fraction >= 0.0 && bottom_exclusion_fraction < 1.0) ||
      !(tracking_area_scale > 0.0 && tracking_area_scale <= 1.0))
    throw std::invalid_argument("gate fractions must lie in [0, 1)");
}

namespace {

/// Appends a straight leg sampled every `dt` seconds. The leg's start
/// waypoint takes the leg velocity so interpolation inside it is constant.
void append_leg(std::vector<Waypoint>& wps, const Vec3& to, double speed, double dt,
                std::optional<double> yaw = std::nullopt) {
  Waypoint& from = wps.back();
  const Vec3 delta = to - from.position;
  const double dist = delta.norm();
  if (dist < 1e-9) return;
  const Vec3 vel = delta / dist * speed;
  const double leg_yaw = yaw.value_or(yaw_from_velocity(vel, from.yaw));
  from.velocity = vel;
  from.speed = speed;
  if (yaw || std::hypot(vel.x(), vel.y()) > 1e-6) from.yaw = leg_yaw;
  const double T = dist / speed;
  const int n = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
  const Vec3 p0 = from.position;
  const double t0 = from.t;
  for (int i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    Waypoint w;
    w.t = t0 + s * T;
    w.position = i == n ? to : Vec3(p0 + s * delta);
    w.velocity = vel;
    w.speed = speed;
    w.yaw = leg_yaw;
    wps.push_back(w);
  }
}

Waypoint waypoint_at(const Vec3& p, double t, double yaw) {
  Waypoint w;
  w.t = t;
  w.position = p;
  w.yaw = yaw;
  return w;
}

}  // namespace

std::vector<double> lawnmower_leg_offsets(const Arena& arena, double sweep_width) {
  if (!(sweep_width > 0.0)) throw std::invalid_argument("invalid geometry: sweep width must be positive");
  if (sweep_width > arena.width + 1e-9) throw std::invalid_argument("invalid geometry: sweep wider than arena");
  const int n = static_cast<int>(std::ceil(arena.width / sweep_width - 1e-9));
  std::vector<double> ys;
  for (int i = 0; i < n; ++i) ys.push_back(std::min(0.5 * sweep_width + i * sweep_width, arena.width - 0.5 * sweep_width));
  return ys;
}

Trajectory lawnmower_plan(const Arena& arena, double sweep_width, double altitude, double speed, double sample_dt) {
  arena.validate();
  if (!(speed > 0.0) || !(sample_dt > 0.0)) throw std::invalid_argument("plan speed and spacing must be positive");
  const auto ys = lawnmower_leg_offsets(arena, sweep_width);

  std::vector<Vec3> corners;
  bool outbound = true;
  auto add_leg = [&](double y) {
    const double xa = outbound ? 0.0 : arena.length;
    const double xb = outbound ? arena.length : 0.0;
    corners.emplace_back(xa, y, altitude);
    corners.emplace_back(xb, y, altitude);
    outbound = !outbound;
  };
  for (double y : ys) add_leg(y);
  for (auto it = ys.rbegin(); it != ys.rend(); ++it) add_leg(std::clamp(*it - 0.5 * sweep_width, 0.0, arena.width));

  std::vector<Waypoint> wps{waypoint_at(corners.front(), 0.0, 0.0)};
  for (std::size_t i = 1; i < corners.size(); ++i) append_leg(wps, corners[i], speed, sample_dt);
  return Trajectory(std::move(wps));
}

Trajectory square_search_plan(const Arena& arena, double altitude, double speed, double side, double sample_dt) {
  arena.validate();
  if (!(altitude > arena.ceiling)) throw std::invalid_argument("square search must fly above the Task 1 ceiling");
  if (!(speed > 0.0) || !(side > 0.0) || !(sample_dt > 0.0)) throw std::invalid_argument("invalid square plan");
  const Vec3 c = arena.center() + Vec3(0.0, 0.0, altitude);
  const double h = 0.5 * side;
  const Vec3 corners[] = {c + Vec3(-h, -h, 0.0), c + Vec3(h, -h, 0.0), c + Vec3(h, h, 0.0), c + Vec3(-h, h, 0.0),
                          c + Vec3(-h, -h, 0.0)};
  std::vector<Waypoint> wps{waypoint_at(corners[0], 0.0, 0.0)};
  for (int i = 1; i < 5; ++i) append_leg(wps, corners[i], speed, sample_dt, 0.0);
  wps.back().velocity.setZero();
  return Trajectory(std::move(wps));
}

Trajectory with_takeoff_landing(const Trajectory& plan, const Vec3& home, double climb_speed) {
  if (plan.empty() || !(climb_speed > 0.0)) throw std::invalid_argument("invalid takeoff/landing request");
  const double yaw = plan.front().yaw;
  std::vector<Waypoint> wps{waypoint_at(home, 0.0, yaw)};
  append_leg(wps, Vec3(home.x(), home.y(), plan.front().position.z()), climb_speed, 0.5, yaw);
  append_leg(wps, plan.front().position, climb_speed, 0.5, yaw);
  const double offset = wps.back().t - plan.start_time();
  wps.pop_back();
  for (auto w : plan.waypoints()) {
    w.t += offset;
    wps.push_back(w);
  }
  const Vec3 end = plan.back().position;
  append_leg(wps, Vec3(end.x(), end.y(), 0.0), climb_speed, 0.5, plan.back().yaw);
  wps.back().velocity.setZero();
  return Trajectory(std::move(wps));
}

bool validate_detection(const Detection& det, const ValidityGate& gate, int image_width, int image_height, int task,
                        bool tracking) {
  const double frac = det.bbox.area() / (static_cast<double>(image_width) * image_height);
  const double threshold = gate.min_bbox_area_fraction * (tracking ? gate.tracking_area_scale : 1.0);
  if (!(frac > threshold)) return false;
  if (task == 2 && det.cy >= (1.0 - gate.bottom_exclusion_fraction) * image_height) return false;
  return true;
}

std::string_view to_string(MissionMode m) {
  switch (m) {
    case MissionMode::GlobalPlan: return "GlobalPlan";
    case MissionMode::Adjust: return "Adjust";
    case MissionMode::Attack: return "Attack";
    case MissionMode::Wait: return "Wait";
    case MissionMode::Recover: return "Recover";
  }
  return "unknown";
}

void MissionState::enter(MissionMode m, double t) {
  mode = m;
  mode_since = t;
  if (m == MissionMode::GlobalPlan) pause_point.reset();
}

LosAngles los_angles(const Vec3& r_cam, const CameraMount& mount) {
  const Vec3 rb = camera_to_body(r_cam, mount);
  return {std::atan2(rb.z(), std::hypot(rb.x(), rb.y())), std::atan2(rb.y(), rb.x())};
}

MissionCommand task1_step(MissionState& s, const std::optional<LosSample>& los, const UavState& uav,
                          const CameraMount& mount, const Task1Params& p, double t) {
  MissionCommand cmd;
  if (s.mode == MissionMode::GlobalPlan) {
    if (!los) return cmd;
    s.pause_point = uav.pose;
    ++s.attempts;
    s.last_seen = t;
    s.last_los_world = camera_to_world(los->r, uav.pose, mount).normalized();
    s.enter(MissionMode::Adjust, t);
    cmd.follow_plan = false;  // stop on the spot; alignment starts next step
    return cmd;
  }

  if (s.mode == MissionMode::Adjust) {
    if (!los) {
      if (t - s.last_seen > p.adjust_timeout) {
        s.enter(MissionMode::Recover, t);
        return cmd;
      }
      cmd.follow_plan = false;
      return cmd;
    }
    s.last_seen = t;
    s.last_los_world = camera_to_world(los->r, uav.pose, mount).normalized();
    const LosAngles a = los_angles(los->r, mount);
    if (std::abs(a.upward - p.upward_threshold) <= p.angle_tolerance && std::abs(a.horizontal) <= p.angle_tolerance) {
      s.enter(MissionMode::Attack, t);
    } else {
      cmd.follow_plan = false;
      cmd.velocity_world = Vec3(0.0, 0.0, std::clamp(p.kz * (a.upward - p.upward_threshold), -p.max_vz, p.max_vz));
      cmd.yaw_rate = std::clamp(p.kyaw * a.horizontal, -p.max_yaw_rate, p.max_yaw_rate);
      return cmd;
    }
  }

  if (s.mode == MissionMode::Attack) {
    if (los) {
      s.last_seen = t;
      s.last_los_world = camera_to_world(los->r, uav.pose, mount).normalized();
    }
    if (t - s.last_seen > p.hold_after_loss || !s.last_los_world) {
      s.enter(MissionMode::Recover, t);
      return cmd;
    }
    cmd.follow_plan = false;
    cmd.velocity_world = p.attack_speed * *s.last_los_world;
    return cmd;
  }
  return cmd;  // Recover and Wait follow the active trajectory
}

Vec3 task2_alignment_velocity(const Vec3& r_cam, const CameraMount& mount, const Task2Params& p) {
  const Vec3 rb = camera_to_body(r_cam, mount).normalized();
  Vec3 v(0.0, p.k * rb.y(), p.k * rb.z());
  const double n = v.norm();
  if (n > p.max_speed) v *= p.max_speed / n;
  return v;
}

MissionCommand task2_step(MissionState& s, const std::optional<LosSample>& los, const UavState& uav,
                          const CameraMount& mount, const Task2Params& p, double t) {
  MissionCommand cmd;
  switch (s.mode) {
    case MissionMode::GlobalPlan:
      if (!los) return cmd;
      s.pause_point = uav.pose;
      ++s.attempts;
      s.enter(MissionMode::Adjust, t);
      break;
    case MissionMode::Wait:
      if (los) {
        s.enter(MissionMode::Adjust, t);
      } else if (t - s.mode_since >= p.wait_timeout) {
        s.enter(MissionMode::GlobalPlan, t);
        return cmd;
      } else {
        cmd.follow_plan = false;
        return cmd;
      }
      break;
    case MissionMode::Adjust:
      if (!los) {
        s.enter(MissionMode::Wait, t);
        cmd.follow_plan = false;
        return cmd;
      }
      break;
    default: return cmd;
  }
  s.last_seen = t;
  cmd.follow_plan = false;
  const Vec3 v_body = task2_alignment_velocity(los->r, mount, p);
  cmd.velocity_world = rotation_z(uav.pose.attitude.yaw) * v_body;
  return cmd;
}

std::size_t plan_index_after(const Trajectory& plan, double t) {
  const auto& w = plan.waypoints();
  const auto it = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& x) { return v < x.t; });
  return static_cast<std::size_t>(std::distance(w.begin(), it));
}

RecoveryPlan recovery_stitch(const Pose& current, const Pose& pause_point, const Trajectory& plan,
                             std::size_t pause_index, double speed, double start_time, double climb) {
  if (!(speed > 0.0) || climb < 0.0) throw std::invalid_argument("recovery speed must be positive");
  const double yaw = current.attitude.yaw;
  std::vector<Waypoint> wps{waypoint_at(current.position, start_time, yaw)};
  append_leg(wps, current.position + Vec3(0.0, 0.0, climb), speed, 0.5, yaw);
  append_leg(wps, pause_point.position, speed, 0.5, pause_point.attitude.yaw);
  RecoveryPlan out;
  out.resume_time = wps.back().t;
  wps.back().yaw = pause_point.attitude.yaw;

  if (pause_index < plan.size()) {
    const Waypoint& next = plan.waypoints()[pause_index];
    const double leg_speed = next.speed > 0.0 ? next.speed : speed;
    const double gap = (next.position - pause_point.position).norm() / leg_speed;
    const double offset = out.resume_time + std::max(gap, 1e-3) - next.t;
    wps.back().velocity = gap > 0.0 ? Vec3((next.position - pause_point.position) / gap) : Vec3::Zero();
    wps.back().speed = wps.back().velocity.norm();
    for (std::size_t i = pause_index; i < plan.size(); ++i) {
      Waypoint w = plan.waypoints()[i];
      w.t += offset;
      wps.push_back(w);
    }
  } else {
    wps.back().velocity.setZero();
  }
  out.trajectory = Trajectory(std::move(wps));
  return out;
}

void MissionScenario::validate() const {
  if (task != 1 && task != 2) throw std::invalid_argument("task must be 1 or 2");
  arena.validate();
  gate.validate();
  vehicle.validate();
  gains.validate();
  if (!(duration > 0.0) || !(perception_hz > 0.0)) throw std::invalid_argument("duration and rates must be positive");
  if (faults.camera_latency < 0.0) throw std::invalid_argument("camera latency must be non-negative");
  if (!camera.valid()) throw std::invalid_argument("camera intrinsics invalid");
  if (task == 2) target.validate();
}

namespace {

std::string fnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fvec(const Vec3& v) { return "[" + fnum(v.x()) + "," + fnum(v.y()) + "," + fnum(v.z()) + "]"; }

// The camera sits on a stabilised gimbal: it follows the body's yaw only.
UavState gimbal_frame(const UavState& uav) {
  UavState g = uav;
  g.pose.attitude.roll = 0.0;
  g.pose.attitude.pitch = 0.0;
  return g;
}

struct PendingFrame {
  double deliver_at;
  std::optional<Vec3> r;  ///< camera ray of the accepted detection
};

}  // namespace

MissionResult run_mission(const MissionScenario& sc) {
  sc.validate();
  MissionResult res;
  auto log = [&res](double t, std::string type, std::string detail = {}) {
    res.events.push_back({t, std::move(type), std::move(detail)});
  };

  const double dt = 0.005;
  const int ctrl_every = 4;
  const double dt_ctrl = ctrl_every * dt;

  Trajectory plan = sc.task == 1 ? lawnmower_plan(sc.arena, sc.sweep_width, sc.altitude, sc.plan_speed)
                                 : square_search_plan(sc.arena, sc.square_altitude, sc.square_speed, sc.square_side);
  if (sc.takeoff) plan = with_takeoff_landing(plan, sc.start);
  const double recover_speed = sc.task == 1 ? sc.plan_speed : sc.square_speed;
  Trajectory active = plan;
  double resume_time = 0.0;

  UavState uav;
  uav.pose.position = plan.front().position;
  uav.pose.attitude.yaw = plan.front().yaw;

  const CameraMount nominal{sc.mount_pitch, 0.0};
  PoseController pose_ctl(sc.gains);
  VelocityController vel_ctl(sc.gains, sc.vehicle);
  AttitudeCommand att;
  att.thrust = sc.vehicle.hover_thrust();

  struct Balloon {
    BalloonSpec spec;
    Vec3 offset = Vec3::Zero();
    bool popped = false;
    int downdraft_attempt = -1;
  };
  std::vector<Balloon> balloons;
  for (const auto& b : sc.balloons) balloons.push_back({b});

  std::optional<TargetPath> target;
  if (sc.task == 2) target = build_path(sc.target);
  auto target_state = [&](double t) {
    const double v0 = sc.target.speed;
    const double s = v0 * std::min(t, sc.slow_after) + sc.slow_speed * std::max(0.0, t - sc.slow_after);
    return target->sample_arc(s, t < sc.slow_after ? v0 : sc.slow_speed);
  };

  MissionState ms;
  SegmentationImage img(sc.camera.width, sc.camera.height);
  std::deque<PendingFrame> pending;
  std::optional<Vec3> delivered_r;
  bool was_detected = false;
  long last_slot = -1;
  double attack_min = std::numeric_limits<double>::infinity();
  int attack_balloon = -1;
  bool attack_popped = false;
  Vec3 v_ref = Vec3::Zero();
  double yaw_rate = 0.0;
  res.min_target_distance = std::numeric_limits<double>::infinity();

  auto start_recovery = [&](double t) {
    if (!ms.pause_point) return;
    const RecoveryPlan rp = recovery_stitch(uav.pose, *ms.pause_point, active, ms.pause_index, recover_speed, t,
                                            sc.task1.climb);
    active = rp.trajectory;
    resume_time = rp.resume_time;
    pose_ctl.reset();
  };

  const long ticks = static_cast<long>(std::ceil(sc.duration / dt));
  for (long tick = 0; tick <= ticks; ++tick) {
    const double t = tick * dt;
    const bool gimbal_fault = ms.attempts <= sc.faults.gimbal.attempts && sc.faults.gimbal.attempts > 0;
    const CameraMount actual{nominal.pitch + (gimbal_fault ? sc.faults.gimbal.pitch : 0.0),
                             nominal.yaw + (gimbal_fault ? sc.faults.gimbal.yaw : 0.0)};

    // World interaction.
    std::optional<TargetState> tgt;
    if (target) {
      tgt = target_state(t);
      const double d = (tgt->position - uav.pose.position).norm();
      res.min_target_distance = std::min(res.min_target_distance, d);
      if (!res.captured && d <= sc.capture_radius + tgt->radius) {
        res.captured = true;
        log(t, "capture", "\"distance\":" + fnum(d));
      }
    }
    for (std::size_t i = 0; i < balloons.size(); ++i) {
      Balloon& b = balloons[i];
      if (b.popped) continue;
      const Vec3 c = b.spec.anchor + b.offset;
      const double d = (c - uav.pose.position).norm();
      if (ms.mode == MissionMode::Attack) {
        if (attack_balloon < 0 || static_cast<int>(i) == attack_balloon) {
          if (d < attack_min) {
            attack_min = d;
            attack_balloon = static_cast<int>(i);
          }
        }
      }
      const DowndraftFault& dd = sc.faults.downdraft;
      const Vec3 horiz(c.x() - uav.pose.position.x(), c.y() - uav.pose.position.y(), 0.0);
      if (dd.enabled && b.downdraft_attempt != ms.attempts && uav.pose.position.z() > c.z() &&
          horiz.norm() < dd.radius && d > sc.prop_radius + b.spec.radius) {
        b.downdraft_attempt = ms.attempts;
        const Vec3 dir = horiz.norm() > 1e-6 ? Vec3(horiz.normalized()) : Vec3::UnitX();
        b.offset += dd.impulse * dir;
        if (b.offset.norm() > b.spec.max_offset) b.offset *= b.spec.max_offset / b.offset.norm();
        log(t, "downdraft", "\"balloon\":" + std::to_string(i) + ",\"offset\":" + fvec(b.offset));
      }
      if (d <= sc.prop_radius + b.spec.radius) {
        b.popped = true;
        ++res.pops;
        if (ms.mode == MissionMode::Attack) attack_popped = true;
        log(t, "pop", "\"balloon\":" + std::to_string(i) + ",\"attempt\":" + std::to_string(ms.attempts));
        if (ms.mode == MissionMode::Attack || ms.mode == MissionMode::Adjust) {
          log(t, "mode", "\"from\":\"" + std::string(to_string(ms.mode)) + "\",\"to\":\"Recover\"");
          ms.enter(MissionMode::Recover, t);
          start_recovery(t);
        }
      }
    }

    // Perception, delivered after the camera latency.
    const long slot = static_cast<long>(std::floor(t * sc.perception_hz + 1e-9));
    if (slot != last_slot) {
      last_slot = slot;
      std::optional<Detection> best;
      std::vector<Vec3> centers;
      if (sc.task == 1) {
        for (const auto& b : balloons)
          if (!b.popped) centers.push_back(b.spec.anchor + b.offset);
      } else {
        centers.push_back(tgt->position);
      }
      const double radius = sc.task == 1 ? 0.0 : tgt->radius;
      const bool tracking = ms.mode == MissionMode::Adjust || ms.mode == MissionMode::Attack || ms.mode == MissionMode::Wait;
      for (std::size_t i = 0; i < centers.size(); ++i) {
        const double r = sc.task == 1 ? balloons[0].spec.radius : radius;
        img.clear();
        render_sphere_into(img, world_point_to_camera(centers[i], gimbal_frame(uav).pose, actual), r, sc.camera);
        const auto det = centroid(img);
        if (det && validate_detection(*det, sc.gate, sc.camera.width, sc.camera.height, sc.task, tracking) &&
            (!best || det->pixel_count > best->pixel_count))
          best = det;
      }
      PendingFrame f{t + sc.faults.camera_latency, std::nullopt};
      if (best) f.r = pixel_to_los(best->cx, best->cy, sc.camera);
      pending.push_back(f);
    }
    bool fresh = false;
    while (!pending.empty() && pending.front().deliver_at <= t + 1e-12) {
      delivered_r = pending.front().r;
      pending.pop_front();
      fresh = true;
    }
    if (fresh && delivered_r.has_value() != was_detected) {
      was_detected = delivered_r.has_value();
      log(t, was_detected ? "detection" : "lost", "\"mode\":\"" + std::string(to_string(ms.mode)) + "\"");
    }

    // Mission logic and control.
    if (tick % ctrl_every == 0) {
      std::optional<LosSample> los;
      if (delivered_r) los = make_los_sample(*delivered_r, t, std::nullopt, 0.0);
      const MissionMode before = ms.mode;
      const std::optional<Pose> prev_pause = ms.pause_point;
      const MissionCommand cmd = sc.task == 1 ? task1_step(ms, los, gimbal_frame(uav), nominal, sc.task1, t)
                                              : task2_step(ms, los, gimbal_frame(uav), nominal, sc.task2, t);
      if (ms.mode != before) {
        std::string detail = "\"from\":\"" + std::string(to_string(before)) + "\",\"to\":\"" +
                             std::string(to_string(ms.mode)) + "\",\"attempt\":" + std::to_string(ms.attempts);
        if (ms.mode == MissionMode::Attack && los) {
          const LosAngles a = los_angles(los->r, nominal);
          detail += ",\"upward_deg\":" + fnum(rad2deg(a.upward)) + ",\"horizontal_deg\":" + fnum(rad2deg(a.horizontal));
        }
        log(t, "mode", detail);
        if (before == MissionMode::GlobalPlan) ms.pause_index = plan_index_after(active, t);
        if (ms.mode == MissionMode::Attack) {
          ++res.attack_entries;
          attack_min = std::numeric_limits<double>::infinity();
          attack_balloon = -1;
          attack_popped = false;
        }
        if (before == MissionMode::Attack && ms.mode == MissionMode::Recover && !attack_popped) {
          ++res.misses;
          log(t, "miss", "\"closest\":" + fnum(attack_min) + ",\"attempt\":" + std::to_string(ms.attempts));
        }
        if (ms.mode == MissionMode::Recover) start_recovery(t);
        if (before == MissionMode::Wait && ms.mode == MissionMode::GlobalPlan && prev_pause) {
          // Back to where the search was interrupted, then carry on with it.
          ms.pause_point = prev_pause;
          ms.enter(MissionMode::Recover, t);
          log(t, "mode", "\"from\":\"GlobalPlan\",\"to\":\"Recover\",\"attempt\":" + std::to_string(ms.attempts));
          start_recovery(t);
        }
      }
      if (ms.mode == MissionMode::Recover && t >= resume_time) {
        log(t, "mode", "\"from\":\"Recover\",\"to\":\"GlobalPlan\",\"attempt\":" + std::to_string(ms.attempts));
        ms.enter(MissionMode::GlobalPlan, t);
      }

      if (cmd.follow_plan || ms.mode == MissionMode::GlobalPlan || ms.mode == MissionMode::Recover) {
        const Waypoint track = active.sample(t);
        v_ref = pose_ctl.step(track, track.velocity, uav, dt_ctrl);
        yaw_rate = std::clamp(1.5 * wrap_angle(track.yaw - uav.pose.attitude.yaw), -1.0, 1.0);
      } else {
        v_ref = cmd.velocity_world;
        if (sc.task == 1 && uav.pose.position.z() >= sc.arena.ceiling && v_ref.z() > 0.0) v_ref.z() = 0.0;
        yaw_rate = cmd.yaw_rate;
      }
      att = vel_ctl.step(v_ref, Vec3::Zero(), yaw_rate, uav, dt_ctrl);

      MissionSample smp;
      smp.t = t;
      smp.mode = ms.mode;
      smp.uav_position = uav.pose.position;
      smp.command_velocity = v_ref;
      smp.detected = los.has_value();
      if (tgt) smp.target_position = tgt->position;
      if (los) smp.los_body = camera_to_body(los->r, nominal).normalized();
      res.samples.push_back(smp);
    }

    uav = dynamics_step(uav, att, sc.vehicle, dt);
    if (res.captured) break;
  }
  log(res.samples.empty() ? 0.0 : res.samples.back().t, "end",
      "\"pops\":" + std::to_string(res.pops) + ",\"misses\":" + std::to_string(res.misses) +
          ",\"captured\":" + (res.captured ? std::string("true") : std::string("false")));
  return res;
}

void write_event_log(const MissionResult& r, std::ostream& os) {
  for (const auto& e : r.events) {
    os << "{\"t\":" << fnum(e.t) << ",\"event\":\"" << e.type << '"';
    if (!e.detail.empty()) os << ',' << e.detail;
    os << "}\n";
  }
}

}  // namespace losguide
