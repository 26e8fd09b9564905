#include "losguide/engagement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace losguide {

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::Timeout: return "timeout";
    case FailureReason::OutOfBounds: return "out_of_bounds";
    case FailureReason::FovLoss: return "fov_loss";
    case FailureReason::Crash: return "crash";
  }
  return "unknown";
}

std::string_view to_string(ClosingVelocityEstimate e) {
  return e == ClosingVelocityEstimate::RangeRate ? "range_rate" : "uav_projection";
}

std::optional<ClosingVelocityEstimate> parse_closing_velocity_estimate(std::string_view name) {
  if (name == "range_rate") return ClosingVelocityEstimate::RangeRate;
  if (name == "uav_projection") return ClosingVelocityEstimate::UavProjection;
  return std::nullopt;
}

void HitConditions::validate() const {
  if (!(hit_radius > 0.0) || !(max_duration > 0.0) || !(max_fov_loss > 0.0))
    throw std::invalid_argument("hit radius, duration and FOV-loss limits must be positive");
  if ((box_size.array() <= 0.0).any()) throw std::invalid_argument("bounds box must have positive extents");
  if (!(crash_accel > 0.0) || crash_sustain < 0.0) throw std::invalid_argument("crash thresholds invalid");
}

void SimSettings::validate() const {
  guidance.validate();
  gains.validate();
  vehicle.validate();
  hit.validate();
  if (!camera.valid()) throw std::invalid_argument("camera intrinsics invalid");
  if (!(rates.dynamics_hz > 0.0 && rates.control_hz > 0.0 && rates.perception_hz > 0.0 && rates.replan_hz > 0.0))
    throw std::invalid_argument("rates must be positive");
  if (!(range_rate_window > 0.0)) throw std::invalid_argument("range_rate_window must be positive");
  if (rates.control_hz > rates.dynamics_hz || rates.perception_hz > rates.dynamics_hz)
    throw std::invalid_argument("control and perception cannot run faster than the dynamics");
  if (1.0 / rates.dynamics_hz > 0.02 + 1e-12) throw std::invalid_argument("dynamics rate must be at least 50 Hz");
  if (!(trajectory.horizon > 0.0 && trajectory.dt > 0.0 && trajectory.buffer >= 0.0 && trajectory.filter_window >= 1 &&
        trajectory.forecast_baseline > 0.0))
    throw std::invalid_argument("trajectory parameters invalid");
}

void ExperimentConfig::validate() const {
  if (!(uav_speed > 0.0)) throw std::invalid_argument("uav speed must be positive");
  if (target_fraction < 0.0) throw std::invalid_argument("target fraction must be non-negative");
  if (target_speed && *target_speed < 0.0) throw std::invalid_argument("target speed must be non-negative");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  sim.validate();
}

HitClassifier::HitClassifier(const HitConditions& c, double handoff_time, const Vec3& box_center)
    : c_(c),
      handoff_(handoff_time),
      center_(box_center),
      last_seen_(-std::numeric_limits<double>::infinity()),
      min_miss_(std::numeric_limits<double>::infinity()) {}

std::optional<Outcome> HitClassifier::update(const TraceSample& s) {
  const double pursuit = s.t - handoff_;
  auto decide = [&](bool hit, FailureReason reason) {
    return Outcome{hit, reason, s.t, std::max(0.0, pursuit)};
  };

  if (!s.uav_position.allFinite() || !s.uav_velocity.allFinite()) return decide(false, FailureReason::Crash);
  const double surface = (s.uav_position - s.target_position).norm() - s.target_radius;
  min_miss_ = std::min(min_miss_, surface);

  if (s.accel_norm > c_.crash_accel) {
    if (!over_accel_since_) over_accel_since_ = s.t;
    if (s.t - *over_accel_since_ >= c_.crash_sustain) return decide(false, FailureReason::Crash);
  } else {
    over_accel_since_.reset();
  }

  if (s.detected) last_seen_ = s.t;
  const Vec3 off = (s.uav_position - center_).cwiseAbs();
  if ((off.array() > 0.5 * c_.box_size.array()).any()) return decide(false, FailureReason::OutOfBounds);
  if (pursuit >= 0.0 && s.t - std::max(last_seen_, handoff_) > c_.max_fov_loss)
    return decide(false, FailureReason::FovLoss);
  if (pursuit >= c_.max_duration) return decide(false, FailureReason::Timeout);
  if (surface <= c_.hit_radius) return decide(true, FailureReason::None);
  return std::nullopt;
}

Outcome classify_hit(const Trace& trace, const HitConditions& c) {
  HitClassifier cls(c, trace.handoff_time, trace.box_center);
  for (const auto& s : trace.samples) {
    if (auto o = cls.update(s)) return *o;
  }
  Outcome o;
  o.reason = FailureReason::Timeout;
  if (!trace.samples.empty()) {
    o.time = trace.samples.back().t;
    o.duration = std::max(0.0, o.time - trace.handoff_time);
  }
  return o;
}

namespace {

struct FrameRecord {
  double t;
  Vec3 uav_position;
  Vec3 los_world;  ///< filtered unit LOS
  double depth;    ///< filtered centre range
};

double mean_abs_rate(const std::deque<std::pair<double, double>>& hist, double t0, double t1) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [t, rate] : hist) {
    if (t >= t0 - 1e-9 && t <= t1 + 1e-9) {
      sum += std::abs(rate);
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

Vec3 clamp_norm(const Vec3& v, double max_norm) {
  const double n = v.norm();
  return n > max_norm ? Vec3(v * (max_norm / n)) : v;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed, TrialRecorder* rec) {
  cfg.validate();
  const SimSettings& sim = cfg.sim;
  const GuidanceParams& gp = sim.guidance;
  const CameraIntrinsics& cam = sim.camera;

  TargetPathSpec spec = sim.path;
  spec.kind = cfg.path;
  spec.speed = cfg.target_speed_value();
  spec.seed = trial_seed;
  const TargetPath path = build_path(spec);
  if (rec) rec->path = path;

  const VehicleParams vehicle = sim.ideal_dynamics ? VehicleParams::ideal() : sim.vehicle;
  const double dt = 1.0 / sim.rates.dynamics_hz;
  const long ctrl_every = std::max(1L, std::lround(sim.rates.dynamics_hz / sim.rates.control_hz));
  const long replan_every = std::max(1L, std::lround(sim.rates.dynamics_hz / sim.rates.replan_hz));
  const double dt_ctrl = static_cast<double>(ctrl_every) * dt;
  const double speed = cfg.uav_speed;

  CameraMount mount;
  if (sim.compensate_mount_pitch && !sim.ideal_dynamics) mount.pitch = std::atan(vehicle.drag * speed / kGravity);

  ControllerGains gains = sim.gains;
  if (sim.ideal_dynamics) {
    // Near-perfect velocity tracking: stiff proportional loop, no integrator.
    for (auto& g : gains.velocity) g = PidGains{0.5 / dt_ctrl, 0.0, 0.0, 0.0};
  }

  const double handoff = gp.init_duration;
  const double horizon = handoff + sim.hit.max_duration + 1.0;
  UavState state;
  // The bounds box spans the UAV start and the target's initial position.
  const Vec3 box_center = 0.5 * (state.pose.position + path.sample(0.0).position);
  HitClassifier classifier(sim.hit, handoff, box_center);
  if (rec) {
    rec->trace = Trace{};
    rec->trace.handoff_time = handoff;
    rec->trace.box_center = box_center;
    rec->plan = Trajectory{};
  }

  PoseController pose_ctl(gains);
  VelocityController vel_ctl(gains, vehicle);
  AttitudeCommand att_cmd;
  att_cmd.thrust = vehicle.hover_thrust();

  SegmentationImage img(cam.width, cam.height);
  const std::size_t window = sim.trajectory.filter_window;
  MovingAverageFilter<Vec3> los_filter(window);
  MovingAverageFilter<Vec3> rate_filter(window);
  MovingAverageFilter<double> depth_filter(window);
  std::deque<FrameRecord> history;
  std::deque<std::pair<double, double>> rate_hist;
  std::vector<RangeObservation> ranges;  // raw depth estimates for the range-rate fit
  auto estimate_vc = [&](const Vec3& los_w) {
    const double projected = closing_velocity(state.pose.velocity, los_w);
    if (sim.closing_velocity == ClosingVelocityEstimate::UavProjection) return projected;
    return closing_velocity_from_ranges(ranges).value_or(projected);
  };

  std::optional<LosSample> los;
  bool detected = false;
  double last_seen = -std::numeric_limits<double>::infinity();
  std::optional<Vec3> prev_r;
  Pose prev_pose;
  double prev_frame_t = 0.0;
  long last_slot = -1;
  int frame_index = 0;

  GuidanceCommand last_cmd;
  bool handed_off = false;
  Vec3 v_guid = Vec3::Zero();
  Vec3 v_ref = Vec3::Zero();
  Vec3 a_ff = Vec3::Zero();
  double yaw_rate_cmd = 0.0;
  GuidanceMode mode = GuidanceMode::Init;
  Trajectory plan;
  std::optional<TrajectoryCursor> cursor;
  double accel_norm = 0.0;

  TrialResult result;
  result.seed = trial_seed;

  for (long tick = 0;; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    const TargetState tgt = path.sample(t);

    // Perception.
    const long slot = static_cast<long>(std::floor(t * sim.rates.perception_hz + 1e-9));
    if (slot != last_slot) {
      last_slot = slot;
      img.clear();
      render_sphere_into(img, world_point_to_camera(tgt.position, state.pose, mount), tgt.radius, cam);
      const auto det = centroid(img);
      if (rec && rec->on_frame) rec->on_frame(frame_index, t, img);
      ++frame_index;
      detected = det.has_value();
      if (det) {
        last_seen = t;
        const Vec3 r = pixel_to_los(det->cx, det->cy, cam);
        std::optional<Vec3> rp;
        if (prev_r) {
          rp = sim.derotate_los ? world_to_camera(camera_to_world(*prev_r, prev_pose, mount), state.pose, mount)
                                : *prev_r;
        }
        los = make_los_sample(r, t, rp, t - prev_frame_t);
        prev_r = r;
        prev_pose = state.pose;
        prev_frame_t = t;

        const DepthEstimate depth = estimate_depth(img, *det, cam, 2.0 * tgt.radius, sim.edge_mode);
        los_filter.step(camera_to_world(r, state.pose, mount).normalized());
        if (los->valid_rate) {
          rate_filter.step(camera_to_world(los->phi_dot * los->n_unit, state.pose, mount));
          rate_hist.emplace_back(t, los->phi_dot);
          while (!rate_hist.empty() && rate_hist.front().first < t - 0.6) rate_hist.pop_front();
        }
        if (depth.valid) {
          depth_filter.step(depth.d_center);
          ranges.push_back({t, depth.d_center});
          const auto stale = std::find_if(ranges.begin(), ranges.end(),
                                          [&](const RangeObservation& o) { return o.t >= t - sim.range_rate_window; });
          ranges.erase(ranges.begin(), stale);
        }
        if (!depth_filter.empty()) {
          history.push_back({t, state.pose.position, los_filter.value().normalized(), depth_filter.value()});
          while (history.size() > 2 && history.front().t < t - 2.0 * sim.trajectory.forecast_baseline - 0.2)
            history.pop_front();
        }
      }
    }

    // Classification of the state at t.
    TraceSample sample;
    sample.t = t;
    sample.uav_position = state.pose.position;
    sample.uav_velocity = state.pose.velocity;
    sample.attitude = state.pose.attitude;
    sample.target_position = tgt.position;
    sample.target_radius = tgt.radius;
    sample.detected = detected;
    sample.accel_norm = accel_norm;
    sample.phi_dot = los ? los->phi_dot : 0.0;
    sample.mode = mode;
    if (rec && rec->keep_trace) rec->trace.samples.push_back(sample);
    if (auto outcome = classifier.update(sample); outcome || t > horizon) {
      const Outcome o = outcome.value_or(Outcome{false, FailureReason::Timeout, t, t - handoff});
      result.hit = o.hit;
      result.failure_reason = o.reason;
      result.duration = o.duration;
      result.end_time = t;
      result.min_miss_distance = classifier.min_miss_distance();
      result.phi_dot_final = mean_abs_rate(rate_hist, t - 0.5, t);
      if (!handed_off) result.phi_dot_handoff = mean_abs_rate(rate_hist, t - 0.5, t);
      break;
    }

    // Guidance and control.
    if (tick % ctrl_every == 0) {
      if (t < handoff - 1e-9) {
        mode = GuidanceMode::Init;
        const std::optional<LosSample> current = detected ? los : std::nullopt;
        v_ref = init_guidance(current, speed, state.pose, mount);
        yaw_rate_cmd = current ? std::clamp(gp.kp_yaw * body_heading(camera_to_body(current->r, mount)),
                                            -gp.max_yaw_rate, gp.max_yaw_rate)
                               : 0.0;
        a_ff.setZero();
      } else {
        if (!handed_off) {
          handed_off = true;
          v_guid = v_ref;
          result.phi_dot_handoff = mean_abs_rate(rate_hist, t - 0.5, t);
          const Vec3 rel = tgt.position - state.pose.position;
          result.closing_velocity_handoff = -(tgt.velocity - state.pose.velocity).dot(rel.normalized());
        }

        if (is_los_method(cfg.method)) {
          GuidanceCommand cmd;
          if (detected && los) {
            const Vec3 los_w = camera_to_world(los->r, state.pose, mount).normalized();
            const double vc = estimate_vc(los_w);
            switch (cfg.method) {
              case GuidanceMethod::Tpn: cmd = tpn_command(*los, vc, gp, mount); break;
              case GuidanceMethod::PnHeading:
                cmd = pn_heading_command(*los, los_accel_body(*los, vc, gp, mount), gp, mount);
                break;
              default: cmd = hybrid_command(*los, los_accel_body(*los, vc, gp, mount), gp, mount); break;
            }
            last_cmd = cmd;
          } else {
            cmd = dropout_command(last_cmd, t - last_seen, gp);
          }
          const Vec3 a_world = body_to_world(cmd.accel_body, state.pose);
          v_guid += a_world * dt_ctrl;
          if (cmd.mode == GuidanceMode::HeadingControl) {
            // Horizontal velocity follows the commanded heading.
            const double yaw_next = state.pose.attitude.yaw + cmd.yaw_rate * dt_ctrl;
            const double vh = std::hypot(v_guid.x(), v_guid.y());
            v_guid.x() = vh * std::cos(yaw_next);
            v_guid.y() = vh * std::sin(yaw_next);
          } else {
            v_guid = rotation_z(cmd.yaw_rate * dt_ctrl) * v_guid;
          }
          const double vn = v_guid.norm();
          if (vn > 0.1 * speed) v_guid *= speed / vn;
          const Vec3 dir = vn > 1e-9 ? Vec3(v_guid / v_guid.norm()) : Vec3::Zero();
          a_ff = a_world - a_world.dot(dir) * dir + cmd.yaw_rate * Vec3::UnitZ().cross(v_guid);
          v_ref = v_guid;
          yaw_rate_cmd = cmd.yaw_rate;
          mode = cmd.mode;
        } else {
          const bool replan_tick = (tick - static_cast<long>(std::lround(handoff / dt))) % replan_every == 0;
          if ((replan_tick || plan.empty()) && detected && !los_filter.empty() && !depth_filter.empty()) {
            Waypoint start;
            if (plan.empty() || !cursor) {
              start.t = t;
              start.position = state.pose.position;
              start.velocity = state.pose.velocity;
              start.speed = state.pose.velocity.norm();
              start.yaw = state.pose.attitude.yaw;
            } else {
              start = cursor->lookahead_point;
            }
            const Vec3 los_w = los_filter.value().normalized();
            Waypoint base = start;
            base.t = 0.0;
            Trajectory next;
            if (cfg.method == GuidanceMethod::LosTrajectory) {
              const Vec3 v0 = start.velocity.norm() > 0.3 * speed ? Vec3(speed * start.velocity.normalized())
                                                                  : Vec3(speed * los_w);
              const Vec3 rate_w = rate_filter.empty() ? Vec3::Zero() : rate_filter.value();
              const double vc = estimate_vc(los_w);
              const Vec3 a = clamp_norm(gp.N * std::max(vc, 0.0) * rate_w, gp.max_accel);
              next = gen_los_accel_trajectory(base, v0, a, sim.trajectory.horizon, sim.trajectory.dt);
            } else {
              const FrameRecord& now_rec = history.back();
              const FrameRecord* past = nullptr;
              for (const auto& h : history) {
                if (h.t <= now_rec.t - sim.trajectory.forecast_baseline + 1e-9) past = &h;
              }
              Vec3 goal = now_rec.uav_position + now_rec.depth * now_rec.los_world;
              double T = now_rec.depth / speed;
              if (past) {
                const Vec3 rel0 = past->uav_position + past->depth * past->los_world - now_rec.uav_position;
                ForecastInputs in;
                in.d0 = rel0.norm();
                in.los0 = rel0 / std::max(in.d0, 1e-9);
                in.d1 = now_rec.depth;
                in.los1 = now_rec.los_world;
                in.t0 = past->t;
                in.t1 = now_rec.t;
                in.uav_vel = state.pose.velocity;
                const auto f = forecast_target(in);
                if (f && f->t_collision < sim.hit.max_duration && f->p_collision.norm() < 4.0 * now_rec.depth + 10.0) {
                  goal = now_rec.uav_position + f->p_collision;
                  T = f->t_collision - (start.t - now_rec.t);
                }
              }
              const double dist = (goal - start.position).norm();
              T = std::clamp(std::max(T, dist / (1.5 * speed)), 3.0 * sim.trajectory.dt, sim.hit.max_duration);
              next = gen_forecast_trajectory(base, goal, T, sim.trajectory.dt);
            }
            plan = plan.empty() ? next.shifted(start.t) : stitch(plan, next, start.t, 1e-6);
          }
          if (!plan.empty()) {
            cursor = cursor_step(plan, t, sim.rates.replan_hz, sim.trajectory.buffer, cursor);
            const Waypoint& track = cursor->tracking_point;
            v_ref = pose_ctl.step(track, track.velocity, state, dt_ctrl);
            yaw_rate_cmd = std::clamp(gp.kp_yaw * wrap_angle(track.yaw - state.pose.attitude.yaw), -gp.max_yaw_rate,
                                      gp.max_yaw_rate);
          }
          a_ff.setZero();
          mode = GuidanceMode::PN;
        }
      }
      att_cmd = vel_ctl.step(v_ref, a_ff, yaw_rate_cmd, state, dt_ctrl);
    }

    const UavState next = sim.ideal_dynamics
                              ? point_mass_step(state, vel_ctl.last_accel_demand(), yaw_rate_cmd, dt)
                              : dynamics_step(state, att_cmd, vehicle, dt);
    accel_norm = ((next.pose.velocity - state.pose.velocity) / dt).norm();
    state = next;
  }

  if (rec) rec->plan = plan;
  return result;
}

}  // namespace losguide
