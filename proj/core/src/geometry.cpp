#include "losguide/geometry.hpp"

#include <cmath>

namespace losguide {

double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

CameraIntrinsics CameraIntrinsics::from_hfov(double hfov_rad, int width, int height) {
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  k.fx = k.cx / std::tan(0.5 * hfov_rad);
  k.fy = k.fx;
  return k;
}

CameraIntrinsics CameraIntrinsics::simulation_default() {
  return from_hfov(deg2rad(105.0), 680, 480);
}

bool CameraIntrinsics::valid() const {
  return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx > 0.0 && cx < width &&
         cy > 0.0 && cy < height;
}

Vec3 pixel_to_los(double u, double v, const CameraIntrinsics& k) {
  return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

std::optional<PixelCoord> project_to_pixel(const Vec3& p_cam, const CameraIntrinsics& k) {
  if (!(p_cam.z() > 0.0)) return std::nullopt;
  return PixelCoord{k.fx * p_cam.x() / p_cam.z() + k.cx, k.fy * p_cam.y() / p_cam.z() + k.cy};
}

LosRate los_rate(const Vec3& r_prev, const Vec3& r_curr, double dt) {
  LosRate out;
  // atan2 of |a x b| and a.b is the same angle as the arccos form but keeps
  // precision for the near-parallel rays seen every frame.
  const double angle = std::atan2(r_prev.cross(r_curr).norm(), r_prev.dot(r_curr));
  out.phi_dot = angle / dt;
  if (angle <= 1e-12) return out;

  const Vec3 n = r_curr - (r_curr.dot(r_prev) / r_prev.squaredNorm()) * r_prev;
  const double n_norm = n.norm();
  if (n_norm <= 1e-12 * r_curr.norm()) return out;
  out.n_unit = n / n_norm;
  out.direction_valid = true;
  return out;
}

LosSample make_los_sample(const Vec3& r_curr, double t, const std::optional<Vec3>& r_prev, double dt) {
  LosSample s;
  s.r = r_curr;
  s.t = t;
  if (r_prev && dt > 0.0) {
    const LosRate rate = los_rate(*r_prev, r_curr, dt);
    s.phi_dot = rate.phi_dot;
    s.n_unit = rate.n_unit;
    s.valid_rate = true;
    if (!rate.direction_valid) s.phi_dot = 0.0;
  }
  return s;
}

double body_heading(const Vec3& r_body) { return std::atan2(r_body.y(), r_body.x()); }

Mat3 rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Mat3 rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

Mat3 rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

Mat3 body_to_world_rotation(const Attitude& att) {
  return rotation_z(att.yaw) * rotation_y(att.pitch) * rotation_x(att.roll);
}

Mat3 camera_to_body_rotation(const CameraMount& mount) {
  // Columns are the camera x (right), y (down) and z (forward) axes in body axes.
  Mat3 axes;
  axes << 0, 0, 1, -1, 0, 0, 0, -1, 0;
  return rotation_z(mount.yaw) * rotation_y(-mount.pitch) * axes;
}

Vec3 camera_to_body(const Vec3& v, const CameraMount& mount) {
  return camera_to_body_rotation(mount) * v;
}

Vec3 body_to_camera(const Vec3& v, const CameraMount& mount) {
  return camera_to_body_rotation(mount).transpose() * v;
}

Vec3 body_to_world(const Vec3& v, const Pose& pose) {
  return body_to_world_rotation(pose.attitude) * v;
}

Vec3 world_to_body(const Vec3& v, const Pose& pose) {
  return body_to_world_rotation(pose.attitude).transpose() * v;
}

Vec3 body_point_to_world(const Vec3& p, const Pose& pose) {
  return body_to_world(p, pose) + pose.position;
}

Vec3 world_point_to_body(const Vec3& p, const Pose& pose) {
  return world_to_body(p - pose.position, pose);
}

Vec3 camera_to_world(const Vec3& v, const Pose& pose, const CameraMount& mount) {
  return body_to_world(camera_to_body(v, mount), pose);
}

Vec3 world_to_camera(const Vec3& v, const Pose& pose, const CameraMount& mount) {
  return body_to_camera(world_to_body(v, pose), mount);
}

Vec3 world_point_to_camera(const Vec3& p, const Pose& pose, const CameraMount& mount) {
  return world_to_camera(p - pose.position, pose, mount);
}

}  // namespace losguide
