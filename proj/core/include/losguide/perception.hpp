#pragma once

#include "losguide/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace losguide {

/// Binary segmentation image. Tracks the bounding rectangle of set pixels so
/// that consumers only scan the occupied region.
class SegmentationImage {
 public:
  SegmentationImage() = default;
  SegmentationImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int u, int v) const { return mask_[index(u, v)] != 0; }
  void set(int u, int v);
  void clear();
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

  /// Inclusive bounds of set pixels; meaningless when empty().
  int roi_u_min() const { return u_min_; }
  int roi_u_max() const { return u_max_; }
  int roi_v_min() const { return v_min_; }
  int roi_v_max() const { return v_max_; }

  const std::vector<std::uint8_t>& data() const { return mask_; }

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> mask_;
  std::size_t count_ = 0;
  int u_min_ = 0, u_max_ = -1, v_min_ = 0, v_max_ = -1;
};

struct BoundingBox {
  int u_min = 0;
  int u_max = -1;
  int v_min = 0;
  int v_max = -1;

  int width() const { return u_max - u_min + 1; }
  int height() const { return v_max - v_min + 1; }
  double area() const { return static_cast<double>(width()) * height(); }
};

struct Detection {
  double cx = 0.0;  ///< centroid u, px
  double cy = 0.0;  ///< centroid v, px
  std::size_t pixel_count = 0;
  BoundingBox bbox;
};

struct DepthEstimate {
  double d = 0.0;         ///< range to the nearest point on the target, m
  double d_center = 0.0;  ///< range to the target centre, m
  double alpha = 0.0;     ///< subtended angle, rad
  bool valid = false;
};

enum class EdgeMode {
  /// Edges at mean +/- 2 sigma of the rotated pixel set along the radial axis.
  Moment,
  /// Edges at the min/max rotated pixel centre.
  ExtremePixel,
  /// No edges: the subtended angle is the cone whose solid angle matches the
  /// summed per-pixel solid angles of the mask.
  SolidAngle,
};

/// Marks every pixel whose centre ray lies within the sphere's silhouette cone.
SegmentationImage render_sphere(const Vec3& center_cam, double radius, const CameraIntrinsics& k);

/// Same as render_sphere but ORs into an existing image of matching size.
void render_sphere_into(SegmentationImage& img, const Vec3& center_cam, double radius,
                        const CameraIntrinsics& k);

/// Centroid from image moments M10/M00, M01/M00. nullopt when the mask is empty.
std::optional<Detection> centroid(const SegmentationImage& seg);

/// Range from the known target diameter: d = (w/2)/sin(alpha/2) - w/2.
double depth_from_angle(double alpha, double target_diameter);

DepthEstimate estimate_depth(const SegmentationImage& seg, const Detection& det,
                             const CameraIntrinsics& k, double target_diameter,
                             EdgeMode mode = EdgeMode::SolidAngle);

/// Flat moving average over the last `window` samples.
template <typename T>
class MovingAverageFilter {
 public:
  explicit MovingAverageFilter(std::size_t window = 5) : window_(window == 0 ? 1 : window) {}

  T step(const T& sample) {
    buf_.push_back(sample);
    if (buf_.size() > window_) buf_.pop_front();
    return value();
  }

  T value() const {
    T sum = buf_.front();
    for (std::size_t i = 1; i < buf_.size(); ++i) sum = sum + buf_[i];
    return sum / static_cast<double>(buf_.size());
  }

  bool empty() const { return buf_.empty(); }
  std::size_t size() const { return buf_.size(); }
  std::size_t window() const { return window_; }
  void reset() { buf_.clear(); }

 private:
  std::size_t window_;
  std::deque<T> buf_;
};

/// Continuous time without a detection.
class DetectionLossTimer {
 public:
  void start(double t) { last_seen_ = t; }
  void update(bool detected, double t) {
    if (detected) last_seen_ = t;
    now_ = t;
  }
  double loss_duration() const { return now_ - last_seen_; }

 private:
  double last_seen_ = 0.0;
  double now_ = 0.0;
};

/// Binary PGM (P5), 0/255 per pixel.
void write_pgm(const SegmentationImage& seg, const std::string& path);

}  // namespace losguide
