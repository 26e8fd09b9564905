#pragma once

#include "losguide/guidance.hpp"
#include "losguide/perception.hpp"
#include "losguide/targets.hpp"
#include "losguide/trajectory.hpp"
#include "losguide/vehicle.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace losguide {

/// Competition arena. x runs along the 100 m length, y across the 40 m
/// width, origin at a corner on the ground.
struct Arena {
  double length = 100.0;
  double width = 40.0;
  double ceiling = 5.0;  ///< Task 1 altitude limit, m
  Vec3 dropoff = Vec3(5.0, 5.0, 0.0);

  Vec3 center() const { return {0.5 * length, 0.5 * width, 0.0}; }
  void validate() const;
};

/// Forward pass of legs along x spaced `sweep_width` apart in y, then a
/// reverse pass shifted by half a sweep. Takeoff and landing are separate.
Trajectory lawnmower_plan(const Arena& arena, double sweep_width, double altitude, double speed,
                          double sample_dt = 0.5);

/// Closed square loop of side `side` centred on the arena, yaw fixed along
/// the arena's long axis.
Trajectory square_search_plan(const Arena& arena, double altitude, double speed, double side = 20.0,
                              double sample_dt = 0.5);

/// Prepends a vertical climb from `home` and appends a descent to the ground.
Trajectory with_takeoff_landing(const Trajectory& plan, const Vec3& home, double climb_speed = 1.0);

/// Lateral y-positions of the forward legs.
std::vector<double> lawnmower_leg_offsets(const Arena& arena, double sweep_width);

struct ValidityGate {
  double min_bbox_area_fraction = 0.002;
  double bottom_exclusion_fraction = 0.30;  ///< applied for task 2 only
  /// Area threshold multiplier once a target is being engaged, so a locked
  /// target is not dropped when it hovers right at the acquisition size.
  double tracking_area_scale = 0.5;

  void validate() const;
};

/// Area fraction strictly above the threshold; for task 2 the centroid must
/// also sit above the excluded bottom band.
bool validate_detection(const Detection& det, const ValidityGate& gate, int image_width, int image_height, int task,
                        bool tracking = false);

enum class MissionMode { GlobalPlan, Adjust, Attack, Wait, Recover };

std::string_view to_string(MissionMode m);

struct Task1Params {
  double upward_threshold = deg2rad(10.0);
  double angle_tolerance = deg2rad(5.0);
  double kz = 2.0;         ///< m/s of climb per rad of upward-angle error
  double kyaw = 1.5;       ///< 1/s
  double max_vz = 1.0;
  double max_yaw_rate = 1.0;
  double attack_speed = 3.0;
  double hold_after_loss = 1.0;
  double adjust_timeout = 1.0;  ///< detection loss tolerated in Adjust, s
  double climb = 1.5;           ///< recovery climb, m
};

struct Task2Params {
  double k = 2.0;  ///< m/s per unit of normalised LOS component
  double max_speed = 3.0;
  double wait_timeout = 60.0;
};

struct MissionState {
  MissionMode mode = MissionMode::GlobalPlan;
  std::optional<Pose> pause_point;
  std::size_t pause_index = 0;
  double mode_since = 0.0;
  double last_seen = 0.0;
  std::optional<Vec3> last_los_world;
  int attempts = 0;  ///< number of Adjust entries so far

  void enter(MissionMode m, double t);
};

/// Velocity/yaw-rate demand of the guidance modes. When `follow_plan` is set
/// the trajectory controller owns the vehicle and the other fields are unused.
struct MissionCommand {
  Vec3 velocity_world = Vec3::Zero();
  double yaw_rate = 0.0;
  bool follow_plan = true;
};

/// Upward and horizontal LOS angles in body axes (left positive).
struct LosAngles {
  double upward = 0.0;
  double horizontal = 0.0;
};
LosAngles los_angles(const Vec3& r_cam, const CameraMount& mount);

/// Adjust -> Attack -> Recover. `los` is empty when there is no valid
/// detection this step; `pop` reports contact with the balloon.
MissionCommand task1_step(MissionState& s, const std::optional<LosSample>& los, const UavState& uav,
                          const CameraMount& mount, const Task1Params& p, double t);

/// Align on the LOS (zero forward velocity) while the target is visible,
/// Wait in place after losing it, back to GlobalPlan after the wait timeout.
MissionCommand task2_step(MissionState& s, const std::optional<LosSample>& los, const UavState& uav,
                          const CameraMount& mount, const Task2Params& p, double t);

/// Body-frame Task 2 alignment velocity, (0, k r_y, k r_z) of the unit body LOS.
Vec3 task2_alignment_velocity(const Vec3& r_cam, const CameraMount& mount, const Task2Params& p);

struct RecoveryPlan {
  Trajectory trajectory;
  double resume_time = 0.0;  ///< time the pause point is reached again
};

/// Current position, straight up `climb`, back to the pause point, then the
/// remainder of `plan` from `pause_index` on, re-timed to follow on.
RecoveryPlan recovery_stitch(const Pose& current, const Pose& pause_point, const Trajectory& plan,
                             std::size_t pause_index, double speed, double start_time, double climb = 1.5);

/// Index of the first plan waypoint strictly after `t`.
std::size_t plan_index_after(const Trajectory& plan, double t);

// ---------------------------------------------------------------- scenario

struct BalloonSpec {
  Vec3 anchor = Vec3::Zero();
  double radius = 0.3;
  double max_offset = 0.5;  ///< tether play, m
};

struct GimbalFault {
  double yaw = 0.0;    ///< rad, unknown to the LOS computation
  double pitch = 0.0;  ///< rad
  int attempts = 0;    ///< active while fewer Adjust entries than this have completed
};

struct DowndraftFault {
  bool enabled = false;
  double impulse = 0.4;  ///< horizontal push, m
  double radius = 1.0;   ///< horizontal distance that triggers it
};

struct FaultSpec {
  double camera_latency = 0.0;
  GimbalFault gimbal;
  DowndraftFault downdraft;
};

struct MissionScenario {
  int task = 1;
  Arena arena;
  double duration = 120.0;
  Vec3 start = Vec3(0.0, 3.0, 2.4);
  double start_yaw = 0.0;
  bool takeoff = false;

  // Task 1 search
  double sweep_width = 6.0;
  double altitude = 2.4;
  double plan_speed = 2.0;
  std::vector<BalloonSpec> balloons;

  // Task 2 search and target
  double square_altitude = 11.0;
  double square_side = 20.0;
  double square_speed = 1.0;
  TargetPathSpec target;
  double slow_speed = 3.0;
  double slow_after = 480.0;
  double capture_radius = 0.5;

  double prop_radius = 0.4;
  double mount_pitch = 0.0;
  CameraIntrinsics camera = CameraIntrinsics::simulation_default();
  ValidityGate gate;
  Task1Params task1;
  Task2Params task2;
  FaultSpec faults;
  ControllerGains gains;
  VehicleParams vehicle;
  double perception_hz = 30.0;

  void validate() const;
};

struct MissionEvent {
  double t = 0.0;
  std::string type;    ///< mode, detection, lost, pop, miss, downdraft, capture, end
  std::string detail;  ///< pre-rendered JSON members, without braces
};

struct MissionSample {
  double t = 0.0;
  MissionMode mode = MissionMode::GlobalPlan;
  Vec3 uav_position = Vec3::Zero();
  Vec3 command_velocity = Vec3::Zero();
  bool detected = false;
  std::optional<Vec3> target_position;
  std::optional<Vec3> los_body;  ///< unit body LOS when detected
};

struct MissionResult {
  std::vector<MissionEvent> events;
  std::vector<MissionSample> samples;  ///< at control rate
  int pops = 0;
  int misses = 0;
  int attack_entries = 0;
  bool captured = false;
  double min_target_distance = 0.0;  ///< task 2, centre to centre
};

MissionResult run_mission(const MissionScenario& sc);

/// One JSON object per line.
void write_event_log(const MissionResult& r, std::ostream& os);

}  // namespace losguide
