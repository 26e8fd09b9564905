#include "losguide/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace losguide {

SegmentationImage::SegmentationImage(int width, int height)
    : width_(width), height_(height),
      mask_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("segmentation image must be non-empty");
}

void SegmentationImage::set(int u, int v) {
  auto& px = mask_[index(u, v)];
  if (px) return;
  px = 1;
  if (count_ == 0) {
    u_min_ = u_max_ = u;
    v_min_ = v_max_ = v;
  } else {
    u_min_ = std::min(u_min_, u);
    u_max_ = std::max(u_max_, u);
    v_min_ = std::min(v_min_, v);
    v_max_ = std::max(v_max_, v);
  }
  ++count_;
}

void SegmentationImage::clear() {
  if (count_ == 0) return;
  for (int v = v_min_; v <= v_max_; ++v) {
    auto row = mask_.begin() + static_cast<std::ptrdiff_t>(index(u_min_, v));
    std::fill(row, row + (u_max_ - u_min_ + 1), std::uint8_t{0});
  }
  count_ = 0;
  u_min_ = v_min_ = 0;
  u_max_ = v_max_ = -1;
}

SegmentationImage render_sphere(const Vec3& center_cam, double radius, const CameraIntrinsics& k) {
  SegmentationImage img(k.width, k.height);
  render_sphere_into(img, center_cam, radius, k);
  return img;
}

void render_sphere_into(SegmentationImage& img, const Vec3& center_cam, double radius,
                        const CameraIntrinsics& k) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  if (img.width() != k.width || img.height() != k.height)
    throw std::invalid_argument("image size does not match intrinsics");

  const double dist = center_cam.norm();
  if (dist <= radius) {
    for (int v = 0; v < k.height; ++v)
      for (int u = 0; u < k.width; ++u) img.set(u, v);
    return;
  }

  const Vec3 axis = center_cam / dist;
  const double sin_b = radius / dist;
  const double cos_b2 = 1.0 - sin_b * sin_b;
  const double beta = std::asin(sin_b);
  const double off_axis = std::acos(std::clamp(axis.z(), -1.0, 1.0));

  // Every pixel ray is within 90 deg of the optical axis.
  if (off_axis - beta >= 0.5 * kPi) return;

  int u0 = 0, u1 = k.width - 1, v0 = 0, v1 = k.height - 1;
  if (off_axis + beta < deg2rad(80.0)) {
    // Bound the silhouette by projecting a slightly widened cone rim.
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    const Vec3 e2 = axis.cross(e1);
    const double bm = beta * 1.02 + 1e-4;
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    constexpr int kRim = 64;
    for (int i = 0; i < kRim; ++i) {
      const double phi = 2.0 * kPi * i / kRim;
      const Vec3 d = std::cos(bm) * axis + std::sin(bm) * (std::cos(phi) * e1 + std::sin(phi) * e2);
      const auto px = project_to_pixel(d, k);
      if (!px) continue;
      umin = std::min(umin, px->u);
      umax = std::max(umax, px->u);
      vmin = std::min(vmin, px->v);
      vmax = std::max(vmax, px->v);
    }
    u0 = std::max(u0, static_cast<int>(std::floor(umin)) - 2);
    u1 = std::min(u1, static_cast<int>(std::ceil(umax)) + 2);
    v0 = std::max(v0, static_cast<int>(std::floor(vmin)) - 2);
    v1 = std::min(v1, static_cast<int>(std::ceil(vmax)) + 2);
    if (u0 > u1 || v0 > v1) return;
  }

  for (int v = v0; v <= v1; ++v) {
    const double ry = (v - k.cy) / k.fy;
    for (int u = u0; u <= u1; ++u) {
      const double rx = (u - k.cx) / k.fx;
      const double dot = rx * axis.x() + ry * axis.y() + axis.z();
      if (dot <= 0.0) continue;
      if (dot * dot >= cos_b2 * (rx * rx + ry * ry + 1.0)) img.set(u, v);
    }
  }
}

std::optional<Detection> centroid(const SegmentationImage& seg) {
  if (seg.empty()) return std::nullopt;
  double m00 = 0.0, m10 = 0.0, m01 = 0.0;
  for (int v = seg.roi_v_min(); v <= seg.roi_v_max(); ++v) {
    for (int u = seg.roi_u_min(); u <= seg.roi_u_max(); ++u) {
      if (!seg.at(u, v)) continue;
      m00 += 1.0;
      m10 += u;
      m01 += v;
    }
  }
  Detection det;
  det.cx = m10 / m00;
  det.cy = m01 / m00;
  det.pixel_count = seg.count();
  det.bbox = {seg.roi_u_min(), seg.roi_u_max(), seg.roi_v_min(), seg.roi_v_max()};
  return det;
}

double depth_from_angle(double alpha, double target_diameter) {
  const double half = 0.5 * target_diameter;
  return half / std::sin(0.5 * alpha) - half;
}

DepthEstimate estimate_depth(const SegmentationImage& seg, const Detection& det,
                             const CameraIntrinsics& k, double target_diameter, EdgeMode mode) {
  DepthEstimate out;
  if (det.pixel_count < 3 || seg.count() < 3) return out;

  const double dx = det.cx - k.cx;
  const double dy = det.cy - k.cy;
  const double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
  const double c = std::cos(-theta);
  const double s = std::sin(-theta);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double n = 0.0, sum = 0.0, sum_sq = 0.0;
  double omega = 0.0;  // steradians covered by the mask
  bool have_ref = false;
  double ref = 0.0;
  for (int v = seg.roi_v_min(); v <= seg.roi_v_max(); ++v) {
    for (int u = seg.roi_u_min(); u <= seg.roi_u_max(); ++u) {
      if (!seg.at(u, v)) continue;
      const double uc = u - k.cx;
      const double vc = v - k.cy;
      const double u_rot = c * uc - s * vc;
      lo = std::min(lo, u_rot);
      hi = std::max(hi, u_rot);
      if (!have_ref) {
        ref = u_rot;
        have_ref = true;
      }
      const double shifted = u_rot - ref;
      n += 1.0;
      sum += shifted;
      sum_sq += shifted * shifted;
      // A pixel at normalised offset (x, y) subtends cos^3 of its off-axis
      // angle over fx * fy.
      const double x = uc / k.fx, y = vc / k.fy;
      const double q = 1.0 + x * x + y * y;
      omega += 1.0 / (k.fx * k.fy * q * std::sqrt(q));
    }
  }

  if (mode == EdgeMode::SolidAngle) {
    // Cone of half angle a covers 2 pi (1 - cos a).
    const double cos_half = 1.0 - omega / (2.0 * kPi);
    if (!(cos_half > -1.0)) return out;
    out.alpha = 2.0 * std::acos(std::min(1.0, cos_half));
    if (!(out.alpha > 0.0)) return out;
    out.d = depth_from_angle(out.alpha, target_diameter);
    out.d_center = out.d + 0.5 * target_diameter;
    out.valid = out.d > 0.0 && out.alpha < kPi;
    return out;
  }

  if (mode == EdgeMode::Moment) {
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double half_extent = 2.0 * std::sqrt(var);
    lo = ref + mean - half_extent;
    hi = ref + mean + half_extent;
  }

  // Undo the rotation for the two edge points, which lie on the rotated
  // horizontal through the principal point.
  const auto edge_ray = [&](double a) {
    return pixel_to_los(std::cos(theta) * a + k.cx, std::sin(theta) * a + k.cy, k);
  };
  const Vec3 r1 = edge_ray(lo);
  const Vec3 r2 = edge_ray(hi);
  out.alpha = std::atan2(r1.cross(r2).norm(), r1.dot(r2));
  if (!(out.alpha > 0.0)) return out;
  out.d = depth_from_angle(out.alpha, target_diameter);
  out.d_center = out.d + 0.5 * target_diameter;
  out.valid = out.d > 0.0 && out.alpha < kPi;
  return out;
}

void write_pgm(const SegmentationImage& seg, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "P5\n" << seg.width() << ' ' << seg.height() << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(seg.width()));
  for (int v = 0; v < seg.height(); ++v) {
    for (int u = 0; u < seg.width(); ++u) row[static_cast<std::size_t>(u)] = seg.at(u, v) ? char(255) : char(0);
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace losguide
