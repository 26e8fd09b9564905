// losguide: single trials, experiment matrices and mission scenarios.

#include "losguide/config.hpp"
#include "losguide/experiment.hpp"
#include "losguide/mission.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace losguide;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> methods;
  std::vector<double> speeds;
  std::vector<std::string> paths;
  std::vector<double> fractions;
  std::optional<int> trials;
  std::optional<int> parallel;
  bool ideal = false;
};

void add_common(CLI::App* app, Common& c, bool matrix) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "master seed");
  auto* m = app->add_option("--method", c.methods, "tpn, pn-heading, hybrid, los-traj, forecast-traj");
  auto* v = app->add_option("--uav-speed", c.speeds, "UAV speed, m/s");
  auto* p = app->add_option("--path", c.paths, "straight, figure8, knot");
  auto* f = app->add_option("--target-fraction", c.fractions, "target speed as a fraction of UAV speed");
  for (auto* o : {m, v, p, f}) {
    if (matrix) {
      o->delimiter(',');
    } else {
      o->expected(1);
    }
  }
  app->add_flag("--ideal-dynamics", c.ideal, "point-mass vehicle with perfect acceleration tracking");
}

RunConfig resolve(const Common& c) {
  RunConfig rc = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  ExperimentConfig& e = rc.experiment;
  if (c.seed) e.seed = *c.seed;
  if (c.trials) e.trials = *c.trials;
  if (c.parallel) rc.parallel = *c.parallel;
  if (c.ideal) e.sim.ideal_dynamics = true;

  if (!c.methods.empty()) {
    rc.matrix.methods.clear();
    for (const auto& s : c.methods) {
      const auto m = parse_guidance_method(s);
      if (!m) throw CLI::ValidationError("--method", "unknown method '" + s + "'");
      rc.matrix.methods.push_back(*m);
    }
    e.method = rc.matrix.methods.front();
  }
  if (!c.paths.empty()) {
    rc.matrix.paths.clear();
    for (const auto& s : c.paths) {
      const auto p = parse_path_kind(s);
      if (!p) throw CLI::ValidationError("--path", "unknown path '" + s + "'");
      rc.matrix.paths.push_back(*p);
    }
    e.path = rc.matrix.paths.front();
  }
  if (!c.speeds.empty()) {
    rc.matrix.uav_speeds = c.speeds;
    e.uav_speed = c.speeds.front();
  }
  if (!c.fractions.empty()) {
    rc.matrix.target_fractions = c.fractions;
    e.target_fraction = c.fractions.front();
    e.target_speed.reset();
  }
  return rc;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_trace_csv(const Trace& trace, std::ostream& os) {
  os << "t,uav_x,uav_y,uav_z,uav_vx,uav_vy,uav_vz,roll,pitch,yaw,target_x,target_y,target_z,detected,accel,phi_dot,mode\n";
  char buf[512];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof buf, "%.3f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.5f,%.5f,%.5f,%.4f,%.4f,%.4f,%d,%.4f,%.5f,",
                  s.t, s.uav_position.x(), s.uav_position.y(), s.uav_position.z(), s.uav_velocity.x(),
                  s.uav_velocity.y(), s.uav_velocity.z(), s.attitude.roll, s.attitude.pitch, s.attitude.yaw,
                  s.target_position.x(), s.target_position.y(), s.target_position.z(), s.detected ? 1 : 0,
                  s.accel_norm, s.phi_dot);
    os << buf << to_string(s.mode) << '\n';
  }
}

/// The flown path in the waypoint CSV layout.
Trajectory flown(const Trace& trace) {
  std::vector<Waypoint> wps;
  for (const auto& s : trace.samples) {
    if (!wps.empty() && s.t <= wps.back().t) continue;
    Waypoint w;
    w.t = s.t;
    w.position = s.uav_position;
    w.velocity = s.uav_velocity;
    w.speed = s.uav_velocity.norm();
    w.yaw = s.attitude.yaw;
    wps.push_back(w);
  }
  return Trajectory(std::move(wps));
}

int cmd_trial(const Common& c, int trial_index, int pgm_every) {
  const RunConfig rc = resolve(c);
  const ExperimentConfig& e = rc.experiment;
  e.validate();
  const fs::path out(c.out);
  fs::create_directories(out);

  TrialRecorder rec;
  if (pgm_every > 0) {
    fs::create_directories(out / "frames");
    rec.on_frame = [&](int frame, double, const SegmentationImage& img) {
      if (frame % pgm_every != 0) return;
      char name[64];
      std::snprintf(name, sizeof name, "frame_%05d.pgm", frame);
      write_pgm(img, (out / "frames" / name).string());
    };
  }
  const std::uint64_t seed = trial_seed(e.seed, e, trial_index);
  const TrialResult r = run_trial(e, seed, &rec);

  {
    auto f = open_out(out / "trace.csv");
    write_trace_csv(rec.trace, f);
  }
  {
    auto f = open_out(out / "trajectory.csv");
    write_trajectory_csv(flown(rec.trace), f);
  }
  if (!rec.plan.empty()) {
    auto f = open_out(out / "plan.csv");
    write_trajectory_csv(rec.plan, f);
  }
  {
    auto f = open_out(out / "target_path.csv");
    write_path_csv(rec.path, r.end_time, 0.05, f);
  }
  {
    auto f = open_out(out / "config.json");
    f << dump_run_config(rc) << '\n';
  }

  std::printf("method=%s path=%s uav_speed=%g target_speed=%g seed=%llu\n", std::string(to_string(e.method)).c_str(),
              std::string(to_string(e.path)).c_str(), e.uav_speed, e.target_speed_value(),
              static_cast<unsigned long long>(seed));
  std::printf("hit=%d reason=%s duration=%.3f min_miss=%.3f vc_handoff=%.3f phi_dot handoff=%.4f final=%.4f\n",
              r.hit ? 1 : 0, std::string(to_string(r.failure_reason)).c_str(), r.duration, r.min_miss_distance,
              r.closing_velocity_handoff, r.phi_dot_handoff, r.phi_dot_final);
  return 0;
}

int cmd_matrix(const Common& c) {
  const RunConfig rc = resolve(c);
  const auto configs = build_matrix(rc.matrix, rc.experiment);
  std::fprintf(stderr, "running %zu configs x %d trials on %d threads\n", configs.size(), rc.experiment.trials,
               rc.parallel);
  const MatrixResult r = run_matrix(configs, rc.parallel);
  const auto files = write_matrix_outputs(r, c.out);
  {
    auto f = open_out(fs::path(c.out) / "config.json");
    f << dump_run_config(rc) << '\n';
  }
  for (const auto& row : r.rows) {
    std::printf("%-14s %-8s v=%g f=%g hit_rate=%.3f%s\n", std::string(to_string(row.method)).c_str(),
                std::string(to_string(row.path)).c_str(), row.uav_speed, row.target_fraction, row.hit_rate,
                row.unstable ? " unstable" : "");
  }
  std::fprintf(stderr, "wrote %zu files to %s\n", files.size() + 1, c.out.c_str());
  return 0;
}

int cmd_mission(const std::string& config, const std::string& scenario, const std::string& out_dir) {
  MissionScenario sc;
  if (!scenario.empty()) {
    sc = load_mission_scenario(scenario);
  } else if (!config.empty()) {
    sc = load_run_config(config).mission;
  }
  const MissionResult r = run_mission(sc);
  const fs::path out(out_dir);
  fs::create_directories(out);
  {
    auto f = open_out(out / "events.jsonl");
    write_event_log(r, f);
  }
  {
    auto f = open_out(out / "scenario.json");
    f << dump_mission_scenario(sc) << '\n';
  }
  {
    auto f = open_out(out / "mission_samples.csv");
    f << "t,mode,x,y,z,cmd_vx,cmd_vy,cmd_vz,detected\n";
    char buf[256];
    for (const auto& s : r.samples) {
      std::snprintf(buf, sizeof buf, "%.3f,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%d\n", s.t,
                    std::string(to_string(s.mode)).c_str(), s.uav_position.x(), s.uav_position.y(),
                    s.uav_position.z(), s.command_velocity.x(), s.command_velocity.y(), s.command_velocity.z(),
                    s.detected ? 1 : 0);
      f << buf;
    }
  }
  write_event_log(r, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOS guidance simulator"};
  app.require_subcommand(1);

  Common trial_opts;
  int trial_index = 0;
  int pgm_every = 0;
  auto* trial = app.add_subcommand("trial", "run one engagement and write its trace");
  add_common(trial, trial_opts, false);
  trial->add_option("--trial-index", trial_index, "trial index within the config")->check(CLI::NonNegativeNumber);
  trial->add_option("--pgm-every", pgm_every, "dump every Nth segmentation frame as PGM (0 = off)")
      ->check(CLI::NonNegativeNumber);

  Common matrix_opts;
  auto* matrix = app.add_subcommand("matrix", "run the experiment matrix, or the subset picked by the flags");
  add_common(matrix, matrix_opts, true);
  matrix->add_option("--trials", matrix_opts.trials, "trials per config")->check(CLI::PositiveNumber);
  matrix->add_option("--parallel", matrix_opts.parallel, "worker threads")->check(CLI::PositiveNumber);

  std::string mission_config;
  std::string mission_scenario;
  std::string mission_out = "out";
  auto* mission = app.add_subcommand("mission", "run a competition scenario and write its event log");
  mission->add_option("--config", mission_config, "JSON config; its \"mission\" section is used")
      ->check(CLI::ExistingFile);
  mission->add_option("--scenario", mission_scenario, "bare scenario JSON")->check(CLI::ExistingFile);
  mission->add_option("--out", mission_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*trial) return cmd_trial(trial_opts, trial_index, pgm_every);
    if (*matrix) return cmd_matrix(matrix_opts);
    if (*mission) return cmd_mission(mission_config, mission_scenario, mission_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
