#pragma once

#include "losguide/guidance.hpp"
#include "losguide/perception.hpp"
#include "losguide/targets.hpp"
#include "losguide/trajectory.hpp"
#include "losguide/vehicle.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace losguide {

enum class FailureReason { None, Timeout, OutOfBounds, FovLoss, Crash };

std::string_view to_string(FailureReason r);

/// Trial termination rules. Times are pursuit times, counted from handoff.
struct HitConditions {
  double hit_radius = 0.5;  ///< UAV centre to target surface, m
  double max_duration = 20.0;
  Vec3 box_size = Vec3(35.0, 100.0, 40.0);  ///< x, y, z extents centred on the engagement region
  double max_fov_loss = 3.0;
  double crash_accel = 10.0 * kGravity;
  double crash_sustain = 0.1;  ///< s above crash_accel before declaring a crash

  void validate() const;
};

struct SimRates {
  double dynamics_hz = 200.0;
  double control_hz = 50.0;
  double perception_hz = 30.0;
  double replan_hz = 10.0;
};

struct TrajectoryParams {
  double horizon = 1.0;   ///< LOS-acceleration trajectory length, s
  double dt = 0.05;       ///< waypoint spacing, s
  double buffer = 0.1;    ///< extra lookahead beyond one replan period, s
  std::size_t filter_window = 5;
  double forecast_baseline = 0.3;  ///< s between the two forecast observations
};

/// Source of V_c for the LOS-rate laws.
enum class ClosingVelocityEstimate {
  /// Minus the range rate fitted to recent monocular depth estimates, falling
  /// back to the UAV projection until enough estimates have accumulated.
  RangeRate,
  /// UAV velocity projected on the LOS only.
  UavProjection,
};

std::string_view to_string(ClosingVelocityEstimate e);
std::optional<ClosingVelocityEstimate> parse_closing_velocity_estimate(std::string_view name);

/// Everything except the matrix coordinates.
struct SimSettings {
  GuidanceParams guidance;
  ControllerGains gains;
  VehicleParams vehicle;
  CameraIntrinsics camera = CameraIntrinsics::simulation_default();
  TargetPathSpec path;  ///< template; kind, speed and seed are set per trial
  SimRates rates;
  TrajectoryParams trajectory;
  HitConditions hit;
  EdgeMode edge_mode = EdgeMode::SolidAngle;
  bool derotate_los = true;
  ClosingVelocityEstimate closing_velocity = ClosingVelocityEstimate::RangeRate;
  double range_rate_window = 0.5;  ///< s of depth estimates in the range-rate fit
  /// Tilts the camera up by the steady-state cruise pitch.
  bool compensate_mount_pitch = true;
  bool ideal_dynamics = false;

  void validate() const;
};

struct ExperimentConfig {
  GuidanceMethod method = GuidanceMethod::Tpn;
  double uav_speed = 3.0;
  PathKind path = PathKind::Straight;
  double target_fraction = 0.5;
  /// Absolute target speed, overriding the fraction (0 = stationary).
  std::optional<double> target_speed;
  int trials = 50;
  std::uint64_t seed = 1;
  SimSettings sim;

  double target_speed_value() const { return target_speed.value_or(target_fraction * uav_speed); }
  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  Vec3 uav_position = Vec3::Zero();
  Vec3 uav_velocity = Vec3::Zero();
  Attitude attitude;
  Vec3 target_position = Vec3::Zero();
  double target_radius = 0.5;
  bool detected = false;
  double accel_norm = 0.0;  ///< magnitude of the UAV's acceleration, m/s^2
  double phi_dot = 0.0;
  GuidanceMode mode = GuidanceMode::Init;
};

struct Trace {
  double handoff_time = 2.0;
  Vec3 box_center = Vec3::Zero();
  std::vector<TraceSample> samples;
};

struct Outcome {
  bool hit = false;
  FailureReason reason = FailureReason::None;
  double time = 0.0;
  double duration = 0.0;  ///< pursuit time at the decision
};

/// Streaming form of the hit rules; fed one sample at a time, returns the
/// outcome once decided. Failure conditions are checked before the hit test
/// at each instant.
class HitClassifier {
 public:
  HitClassifier(const HitConditions& c, double handoff_time, const Vec3& box_center);
  std::optional<Outcome> update(const TraceSample& s);
  double min_miss_distance() const { return min_miss_; }

 private:
  HitConditions c_;
  double handoff_;
  Vec3 center_;
  double last_seen_;
  std::optional<double> over_accel_since_;
  double min_miss_;
};

/// Runs the classifier over a finished trace. A trace that ends undecided is
/// reported as a timeout.
Outcome classify_hit(const Trace& trace, const HitConditions& c);

struct TrialResult {
  bool hit = false;
  double duration = 0.0;
  FailureReason failure_reason = FailureReason::None;
  double min_miss_distance = 0.0;
  std::uint64_t seed = 0;
  double end_time = 0.0;
  double closing_velocity_handoff = 0.0;  ///< true range rate sign-flipped, m/s
  double phi_dot_handoff = 0.0;           ///< mean |LOS rate| over 0.5 s before handoff
  double phi_dot_final = 0.0;             ///< mean |LOS rate| over the last 0.5 s
};

/// Optional side outputs of a trial.
struct TrialRecorder {
  bool keep_trace = true;
  Trace trace;
  Trajectory plan;  ///< last stitched plan (trajectory methods)
  TargetPath path;
  std::function<void(int frame, double t, const SegmentationImage&)> on_frame;
};

/// One deterministic engagement.
TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed, TrialRecorder* recorder = nullptr);

}  // namespace losguide
