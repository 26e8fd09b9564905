#include "losguide/config.hpp"

#include <json.hpp>

#include <concepts>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace losguide {

namespace {

using nlohmann::json;

// One visitor per struct serves both directions: when reading, fields that
// are present overwrite the defaults; when writing, every field is emitted.
struct Io {
  json* j;
  bool reading;
  std::string where;
  std::set<std::string> seen;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("config " + (where.empty() ? std::string("<root>") : where) + ": " + what);
  }
};

template <typename T>
void convert(Io& io, T& v);

template <typename T>
void field(Io& io, const char* key, T& v) {
  if (io.reading) {
    if (!io.j->contains(key)) return;
    io.seen.insert(key);
  }
  Io sub{&(*io.j)[key], io.reading, io.where.empty() ? key : io.where + "." + key, {}};
  convert(sub, v);
}

void scalar(Io& io, double& v) {
  if (!io.reading) {
    *io.j = v;
  } else if (io.j->is_number()) {
    v = io.j->get<double>();
  } else {
    io.fail("expected a number");
  }
}

void scalar(Io& io, int& v) {
  if (!io.reading) {
    *io.j = v;
  } else if (io.j->is_number_integer()) {
    v = io.j->get<int>();
  } else {
    io.fail("expected an integer");
  }
}

template <std::unsigned_integral U>
  requires(!std::is_same_v<U, bool>)
void scalar(Io& io, U& v) {
  if (!io.reading) {
    *io.j = v;
  } else if (io.j->is_number_unsigned()) {
    v = io.j->get<U>();
  } else {
    io.fail("expected a non-negative integer");
  }
}

void scalar(Io& io, bool& v) {
  if (!io.reading) {
    *io.j = v;
  } else if (io.j->is_boolean()) {
    v = io.j->get<bool>();
  } else {
    io.fail("expected true or false");
  }
}

void scalar(Io& io, Vec3& v) {
  if (!io.reading) {
    *io.j = json::array({v.x(), v.y(), v.z()});
    return;
  }
  if (!io.j->is_array() || io.j->size() != 3) io.fail("expected [x, y, z]");
  for (int i = 0; i < 3; ++i) {
    if (!(*io.j)[i].is_number()) io.fail("expected [x, y, z]");
    v[i] = (*io.j)[i].get<double>();
  }
}

std::string_view to_string(EdgeMode m) {
  switch (m) {
    case EdgeMode::Moment: return "moment";
    case EdgeMode::ExtremePixel: return "extreme_pixel";
    case EdgeMode::SolidAngle: return "solid_angle";
  }
  return "unknown";
}

std::optional<EdgeMode> parse_edge_mode(std::string_view s) {
  if (s == "moment") return EdgeMode::Moment;
  if (s == "extreme_pixel") return EdgeMode::ExtremePixel;
  if (s == "solid_angle") return EdgeMode::SolidAngle;
  return std::nullopt;
}

template <typename E, typename Parse>
void enumeration(Io& io, E& v, Parse parse) {
  if (!io.reading) {
    *io.j = std::string(to_string(v));
    return;
  }
  if (!io.j->is_string()) io.fail("expected a name");
  const auto parsed = parse(io.j->get<std::string>());
  if (!parsed) io.fail("unknown name '" + io.j->get<std::string>() + "'");
  v = *parsed;
}

void scalar(Io& io, GuidanceMethod& v) { enumeration(io, v, parse_guidance_method); }
void scalar(Io& io, PathKind& v) { enumeration(io, v, parse_path_kind); }
void scalar(Io& io, EdgeMode& v) { enumeration(io, v, parse_edge_mode); }
void scalar(Io& io, ClosingVelocityEstimate& v) { enumeration(io, v, parse_closing_velocity_estimate); }

// ------------------------------------------------------------ struct bodies

void visit(Io& io, GuidanceParams& p) {
  field(io, "N", p.N);
  field(io, "kp_yaw", p.kp_yaw);
  field(io, "k_heading", p.k_heading);
  field(io, "suppression", p.suppression);
  field(io, "init_duration", p.init_duration);
  field(io, "max_accel", p.max_accel);
  field(io, "max_yaw_rate", p.max_yaw_rate);
  field(io, "dropout_hold", p.dropout_hold);
  field(io, "dropout_decay", p.dropout_decay);
}

void visit(Io& io, PidGains& g) {
  field(io, "kp", g.kp);
  field(io, "ki", g.ki);
  field(io, "kd", g.kd);
  field(io, "i_limit", g.i_limit);
}

void visit(Io& io, ControllerGains& g) {
  field(io, "position", g.position);
  field(io, "velocity", g.velocity);
  field(io, "feedforward_weight", g.feedforward_weight);
}

void visit(Io& io, VehicleParams& p) {
  field(io, "tau_att", p.tau_att);
  field(io, "tilt_limit", p.tilt_limit);
  field(io, "max_thrust_accel", p.max_thrust_accel);
  field(io, "drag", p.drag);
  field(io, "max_yaw_rate", p.max_yaw_rate);
  field(io, "min_vertical_accel", p.min_vertical_accel);
}

void visit(Io& io, CameraIntrinsics& k) {
  field(io, "fx", k.fx);
  field(io, "fy", k.fy);
  field(io, "cx", k.cx);
  field(io, "cy", k.cy);
  field(io, "width", k.width);
  field(io, "height", k.height);
}

void visit(Io& io, TargetPathSpec& s) {
  field(io, "kind", s.kind);
  field(io, "speed", s.speed);
  field(io, "seed", s.seed);
  field(io, "radius", s.radius);
  field(io, "straight_range_min", s.straight_range_min);
  field(io, "straight_range_max", s.straight_range_max);
  field(io, "straight_edge_fraction", s.straight_edge_fraction);
  field(io, "half_hfov", s.half_hfov);
  field(io, "slope_max", s.slope_max);
  field(io, "start", s.start);
  field(io, "direction", s.direction);
  field(io, "fig8_length", s.fig8_length);
  field(io, "fig8_height", s.fig8_height);
  field(io, "base_yaw", s.base_yaw);
  field(io, "tilt_max", s.tilt_max);
  field(io, "fig8_center_min", s.fig8_center_min);
  field(io, "fig8_center_max", s.fig8_center_max);
  field(io, "knot_size", s.knot_size);
  field(io, "region_center", s.region_center);
  field(io, "region_extent", s.region_extent);
  field(io, "center", s.center);
  field(io, "tilt_angle", s.tilt_angle);
  field(io, "random_phase", s.random_phase);
  field(io, "phase", s.phase);
  field(io, "reverse", s.reverse);
}

void visit(Io& io, SimRates& r) {
  field(io, "dynamics_hz", r.dynamics_hz);
  field(io, "control_hz", r.control_hz);
  field(io, "perception_hz", r.perception_hz);
  field(io, "replan_hz", r.replan_hz);
}

void visit(Io& io, TrajectoryParams& p) {
  field(io, "horizon", p.horizon);
  field(io, "dt", p.dt);
  field(io, "buffer", p.buffer);
  field(io, "filter_window", p.filter_window);
  field(io, "forecast_baseline", p.forecast_baseline);
}

void visit(Io& io, HitConditions& h) {
  field(io, "hit_radius", h.hit_radius);
  field(io, "max_duration", h.max_duration);
  field(io, "box_size", h.box_size);
  field(io, "max_fov_loss", h.max_fov_loss);
  field(io, "crash_accel", h.crash_accel);
  field(io, "crash_sustain", h.crash_sustain);
}

void visit(Io& io, SimSettings& s) {
  field(io, "guidance", s.guidance);
  field(io, "gains", s.gains);
  field(io, "vehicle", s.vehicle);
  field(io, "camera", s.camera);
  field(io, "path", s.path);
  field(io, "rates", s.rates);
  field(io, "trajectory", s.trajectory);
  field(io, "hit", s.hit);
  field(io, "edge_mode", s.edge_mode);
  field(io, "derotate_los", s.derotate_los);
  field(io, "closing_velocity", s.closing_velocity);
  field(io, "range_rate_window", s.range_rate_window);
  field(io, "compensate_mount_pitch", s.compensate_mount_pitch);
  field(io, "ideal_dynamics", s.ideal_dynamics);
}

void visit(Io& io, ExperimentConfig& c) {
  field(io, "method", c.method);
  field(io, "uav_speed", c.uav_speed);
  field(io, "path", c.path);
  field(io, "target_fraction", c.target_fraction);
  field(io, "target_speed", c.target_speed);
  field(io, "trials", c.trials);
  field(io, "seed", c.seed);
}

void visit(Io& io, MatrixAxes& a) {
  field(io, "methods", a.methods);
  field(io, "uav_speeds", a.uav_speeds);
  field(io, "paths", a.paths);
  field(io, "target_fractions", a.target_fractions);
}

void visit(Io& io, Arena& a) {
  field(io, "length", a.length);
  field(io, "width", a.width);
  field(io, "ceiling", a.ceiling);
  field(io, "dropoff", a.dropoff);
}

void visit(Io& io, ValidityGate& g) {
  field(io, "min_bbox_area_fraction", g.min_bbox_area_fraction);
  field(io, "bottom_exclusion_fraction", g.bottom_exclusion_fraction);
  field(io, "tracking_area_scale", g.tracking_area_scale);
}

void visit(Io& io, Task1Params& p) {
  field(io, "upward_threshold", p.upward_threshold);
  field(io, "angle_tolerance", p.angle_tolerance);
  field(io, "kz", p.kz);
  field(io, "kyaw", p.kyaw);
  field(io, "max_vz", p.max_vz);
  field(io, "max_yaw_rate", p.max_yaw_rate);
  field(io, "attack_speed", p.attack_speed);
  field(io, "hold_after_loss", p.hold_after_loss);
  field(io, "adjust_timeout", p.adjust_timeout);
  field(io, "climb", p.climb);
}

void visit(Io& io, Task2Params& p) {
  field(io, "k", p.k);
  field(io, "max_speed", p.max_speed);
  field(io, "wait_timeout", p.wait_timeout);
}

void visit(Io& io, BalloonSpec& b) {
  field(io, "anchor", b.anchor);
  field(io, "radius", b.radius);
  field(io, "max_offset", b.max_offset);
}

void visit(Io& io, GimbalFault& g) {
  field(io, "yaw", g.yaw);
  field(io, "pitch", g.pitch);
  field(io, "attempts", g.attempts);
}

void visit(Io& io, DowndraftFault& d) {
  field(io, "enabled", d.enabled);
  field(io, "impulse", d.impulse);
  field(io, "radius", d.radius);
}

void visit(Io& io, FaultSpec& f) {
  field(io, "camera_latency", f.camera_latency);
  field(io, "gimbal", f.gimbal);
  field(io, "downdraft", f.downdraft);
}

void visit(Io& io, MissionScenario& s) {
  field(io, "task", s.task);
  field(io, "arena", s.arena);
  field(io, "duration", s.duration);
  field(io, "start", s.start);
  field(io, "start_yaw", s.start_yaw);
  field(io, "takeoff", s.takeoff);
  field(io, "sweep_width", s.sweep_width);
  field(io, "altitude", s.altitude);
  field(io, "plan_speed", s.plan_speed);
  field(io, "balloons", s.balloons);
  field(io, "square_altitude", s.square_altitude);
  field(io, "square_side", s.square_side);
  field(io, "square_speed", s.square_speed);
  field(io, "target", s.target);
  field(io, "slow_speed", s.slow_speed);
  field(io, "slow_after", s.slow_after);
  field(io, "capture_radius", s.capture_radius);
  field(io, "prop_radius", s.prop_radius);
  field(io, "mount_pitch", s.mount_pitch);
  field(io, "camera", s.camera);
  field(io, "gate", s.gate);
  field(io, "task1", s.task1);
  field(io, "task2", s.task2);
  field(io, "faults", s.faults);
  field(io, "gains", s.gains);
  field(io, "vehicle", s.vehicle);
  field(io, "perception_hz", s.perception_hz);
}

// --------------------------------------------------------------- dispatch

template <typename T>
concept Visitable = requires(Io& io, T& v) { visit(io, v); };

template <typename T>
concept Scalar = requires(Io& io, T& v) { scalar(io, v); };

template <typename T>
void object(Io& io, T& v) {
  if (!io.reading) {
    *io.j = json::object();
    visit(io, v);
    return;
  }
  if (!io.j->is_object()) io.fail("expected an object");
  visit(io, v);
  for (const auto& [key, value] : io.j->items()) {
    (void)value;
    if (!io.seen.count(key)) io.fail("unknown key '" + key + "'");
  }
}

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

template <typename T>
struct is_sequence : std::false_type {};
template <typename T>
struct is_sequence<std::vector<T>> : std::true_type {};
template <typename T, std::size_t N>
struct is_sequence<std::array<T, N>> : std::true_type {};

template <typename T>
void convert(Io& io, T& v) {
  if constexpr (is_optional<T>::value) {
    if (io.reading) {
      if (io.j->is_null()) {
        v.reset();
        return;
      }
      typename T::value_type inner{};
      convert(io, inner);
      v = inner;
    } else if (v) {
      convert(io, *v);
    } else {
      *io.j = nullptr;
    }
  } else if constexpr (is_sequence<T>::value) {
    if (!io.reading) {
      *io.j = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        Io sub{&(*io.j)[i], false, io.where + "[" + std::to_string(i) + "]", {}};
        convert(sub, v[i]);
      }
      return;
    }
    if (!io.j->is_array()) io.fail("expected an array");
    if constexpr (std::is_same_v<T, std::vector<typename T::value_type>>) {
      v.assign(io.j->size(), typename T::value_type{});
    } else if (io.j->size() != v.size()) {
      io.fail("expected " + std::to_string(v.size()) + " entries");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      Io sub{&(*io.j)[i], true, io.where + "[" + std::to_string(i) + "]", {}};
      convert(sub, v[i]);
    }
  } else if constexpr (Scalar<T>) {
    scalar(io, v);
  } else {
    static_assert(Visitable<T>, "no config mapping for this type");
    object(io, v);
  }
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc = parse_text(json_text);
  RunConfig c;
  Io io{&doc, true, "", {}};
  if (!doc.is_object()) io.fail("expected an object");
  field(io, "experiment", c.experiment);
  field(io, "sim", c.experiment.sim);
  field(io, "matrix", c.matrix);
  field(io, "mission", c.mission);
  field(io, "parallel", c.parallel);
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!io.seen.count(key)) io.fail("unknown key '" + key + "'");
  }
  if (c.parallel < 1) throw std::runtime_error("config parallel: must be at least 1");
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

std::string dump_run_config(const RunConfig& c) {
  RunConfig copy = c;
  json doc = json::object();
  Io io{&doc, false, "", {}};
  field(io, "experiment", copy.experiment);
  field(io, "sim", copy.experiment.sim);
  field(io, "matrix", copy.matrix);
  field(io, "mission", copy.mission);
  field(io, "parallel", copy.parallel);
  return doc.dump(2);
}

MissionScenario parse_mission_scenario(const std::string& json_text) {
  json doc = parse_text(json_text);
  MissionScenario sc;
  Io io{&doc, true, "", {}};
  convert(io, sc);
  return sc;
}

MissionScenario load_mission_scenario(const std::string& path) { return parse_mission_scenario(read_file(path)); }

std::string dump_mission_scenario(const MissionScenario& sc) {
  MissionScenario copy = sc;
  json doc;
  Io io{&doc, false, "", {}};
  convert(io, copy);
  return doc.dump(2);
}

}  // namespace losguide
