#pragma once

#include <Eigen/Dense>

#include <optional>

namespace losguide {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kGravity = 9.81;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

/// Pinhole intrinsics. Camera frame is z-forward, x-right, y-down.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Square pixels, principal point at the image centre.
  static CameraIntrinsics from_hfov(double hfov_rad, int width, int height);
  /// 105 degree horizontal FOV, 680x480.
  static CameraIntrinsics simulation_default();

  bool valid() const;
};

/// Z-up world, x-forward/y-left/z-up body. Angles are radians, yaw about +z,
/// pitch about +y (positive is nose down), roll about +x.
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Attitude attitude;
};

/// Rigid camera mount. `pitch` tilts the optical axis up when positive,
/// `yaw` swings it to the left when positive.
struct CameraMount {
  double pitch = 0.0;
  double yaw = 0.0;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Timestamped line-of-sight observation. `r` is the camera-frame ray with
/// r.z == 1; `phi_dot` and `n_unit` are only meaningful when `valid_rate`.
struct LosSample {
  Vec3 r = Vec3(0.0, 0.0, 1.0);
  double t = 0.0;
  double phi_dot = 0.0;
  Vec3 n_unit = Vec3::Zero();
  bool valid_rate = false;
};

struct LosRate {
  double phi_dot = 0.0;
  Vec3 n_unit = Vec3::Zero();
  /// False when the two rays are parallel and the rotation direction is undefined.
  bool direction_valid = false;
};

Vec3 pixel_to_los(double u, double v, const CameraIntrinsics& k);

/// Returns nullopt when the point is on or behind the image plane (z <= 0).
std::optional<PixelCoord> project_to_pixel(const Vec3& p_cam, const CameraIntrinsics& k);

/// Angular rate between two rays and the unit direction of rotation, taken as
/// the component of `r_curr` orthogonal to `r_prev`.
LosRate los_rate(const Vec3& r_prev, const Vec3& r_curr, double dt);

/// Builds a full LosSample from the previous ray (if any) and the current one.
LosSample make_los_sample(const Vec3& r_curr, double t, const std::optional<Vec3>& r_prev, double dt);

/// Bearing of a body-frame vector in the body x-y plane, atan2(y, x).
double body_heading(const Vec3& r_body);

Mat3 rotation_x(double a);
Mat3 rotation_y(double a);
Mat3 rotation_z(double a);

/// Body to world rotation, R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 body_to_world_rotation(const Attitude& att);
/// Camera to body rotation including the fixed axis permutation.
Mat3 camera_to_body_rotation(const CameraMount& mount);

Vec3 camera_to_body(const Vec3& v, const CameraMount& mount);
Vec3 body_to_camera(const Vec3& v, const CameraMount& mount);
Vec3 body_to_world(const Vec3& v, const Pose& pose);
Vec3 world_to_body(const Vec3& v, const Pose& pose);
Vec3 body_point_to_world(const Vec3& p, const Pose& pose);
Vec3 world_point_to_body(const Vec3& p, const Pose& pose);

Vec3 camera_to_world(const Vec3& v, const Pose& pose, const CameraMount& mount);
Vec3 world_to_camera(const Vec3& v, const Pose& pose, const CameraMount& mount);
/// World point expressed in the camera frame (camera centred on the vehicle).
Vec3 world_point_to_camera(const Vec3& p, const Pose& pose, const CameraMount& mount);

}  // namespace losguide
