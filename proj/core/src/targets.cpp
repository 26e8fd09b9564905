#include "losguide/targets.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <stdexcept>

namespace losguide {

namespace {

Vec3 knot_raw(double t) {
  return {std::sin(t) + 2.0 * std::sin(2.0 * t), std::cos(t) - 2.0 * std::cos(2.0 * t), -std::sin(3.0 * t)};
}

Vec3 knot_raw_tangent(double t) {
  return {std::cos(t) + 4.0 * std::cos(2.0 * t), -std::sin(t) + 4.0 * std::sin(2.0 * t), -3.0 * std::cos(3.0 * t)};
}

struct RawBounds {
  Vec3 lo;
  Vec3 hi;
};

const RawBounds& knot_bounds() {
  static const RawBounds b = [] {
    RawBounds r{Vec3::Constant(std::numeric_limits<double>::infinity()),
                Vec3::Constant(-std::numeric_limits<double>::infinity())};
    constexpr int kN = 1 << 16;
    for (int i = 0; i < kN; ++i) {
      const Vec3 p = knot_raw(2.0 * kPi * i / kN);
      r.lo = r.lo.cwiseMin(p);
      r.hi = r.hi.cwiseMax(p);
    }
    return r;
  }();
  return b;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 uniform_box(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
  const double x = uniform(rng, lo.x(), hi.x());
  const double y = uniform(rng, lo.y(), hi.y());
  const double z = uniform(rng, lo.z(), hi.z());
  return {x, y, z};
}

Vec3 random_unit(std::mt19937_64& rng) {
  const double z = uniform(rng, -1.0, 1.0);
  const double phi = uniform(rng, 0.0, 2.0 * kPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

std::string_view to_string(PathKind k) {
  switch (k) {
    case PathKind::Straight: return "straight";
    case PathKind::Figure8: return "figure8";
    case PathKind::Knot: return "knot";
  }
  return "unknown";
}

std::optional<PathKind> parse_path_kind(std::string_view name) {
  for (auto k : {PathKind::Straight, PathKind::Figure8, PathKind::Knot}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void TargetPathSpec::validate() const {
  if (kind == PathKind::Straight) {
    if (speed < 0.0) throw std::invalid_argument("target speed must be non-negative");
  } else if (!(speed > 0.0)) {
    throw std::invalid_argument("periodic target paths need a positive speed");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("target radius must be positive");
  if (!(fig8_length > 0.0 && fig8_height > 0.0 && knot_size > 0.0))
    throw std::invalid_argument("path extents must be positive");
  if ((region_extent.array() < 0.0).any()) throw std::invalid_argument("region extents must be non-negative");
  if (straight_range_max < straight_range_min) throw std::invalid_argument("straight range bounds reversed");
}

double TargetPath::period() const {
  if (kind_ == PathKind::Straight || !(speed_ > 0.0)) return std::numeric_limits<double>::infinity();
  return length_ / speed_;
}

Vec3 TargetPath::local_point(double theta) const {
  Vec3 raw;
  if (kind_ == PathKind::Figure8) {
    raw = {std::sin(theta), 0.0, std::sin(theta) * std::cos(theta)};
  } else {
    raw = knot_raw(theta);
  }
  return scale_.cwiseProduct(raw + offset_);
}

Vec3 TargetPath::local_tangent(double theta) const {
  Vec3 raw;
  if (kind_ == PathKind::Figure8) {
    raw = {std::cos(theta), 0.0, std::cos(2.0 * theta)};
  } else {
    raw = knot_raw_tangent(theta);
  }
  return scale_.cwiseProduct(raw);
}

double TargetPath::theta_at(double s) const {
  s = std::fmod(s, length_);
  if (s < 0.0) s += length_;
  const double h = 2.0 * kPi / kArcSamples;
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  auto k = static_cast<int>(std::distance(arc_.begin(), it)) - 1;
  k = std::clamp(k, 0, kArcSamples - 1);
  const double theta_k = k * h;
  const double s_k = arc_[static_cast<std::size_t>(k)];
  const auto speed_at = [this](double th) { return local_tangent(th).norm(); };

  double theta = theta_k + (s - s_k) / speed_at(theta_k);
  for (int iter = 0; iter < 3; ++iter) {
    const double mid = 0.5 * (theta_k + theta);
    const double seg = (theta - theta_k) / 6.0 * (speed_at(theta_k) + 4.0 * speed_at(mid) + speed_at(theta));
    theta -= (s_k + seg - s) / speed_at(theta);
  }
  return theta;
}

TargetState TargetPath::sample_arc(double s, double speed) const {
  TargetState st;
  st.radius = radius_;
  if (kind_ == PathKind::Straight) {
    st.position = start_ + direction_ * s;
    st.velocity = direction_ * speed;
    return st;
  }
  const double theta = theta_at(phase_s_ + sign_ * s);
  st.position = center_ + rotation_ * local_point(theta);
  const Vec3 tangent = rotation_ * local_tangent(theta);
  st.velocity = sign_ * speed * tangent.normalized();
  return st;
}

TargetState TargetPath::sample(double t) const { return sample_arc(speed_ * t, speed_); }

std::pair<Vec3, Vec3> TargetPath::bounds(double horizon) const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  const double span = std::min(horizon, period());
  constexpr int kN = 2048;
  for (int i = 0; i <= kN; ++i) {
    const Vec3 p = sample(span * i / kN).position;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

TargetPath build_path(const TargetPathSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  TargetPath path;
  path.kind_ = spec.kind;
  path.speed_ = spec.speed;
  path.radius_ = spec.radius;

  if (spec.kind == PathKind::Straight) {
    const double range = uniform(rng, spec.straight_range_min, spec.straight_range_max);
    const double side = uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : -1.0;
    const double bearing = side * spec.straight_edge_fraction * spec.half_hfov;
    const double height = uniform(rng, -1.0, 1.0);
    const double slope = uniform(rng, -spec.slope_max, spec.slope_max);
    path.start_ = spec.start.value_or(Vec3(range, range * std::tan(bearing), height));
    path.direction_ = spec.direction.value_or(Vec3(0.0, -side * std::cos(slope), std::sin(slope))).normalized();
    path.center_ = path.start_;
    return path;
  }

  if (spec.kind == PathKind::Figure8) {
    path.scale_ = Vec3(0.5 * spec.fig8_length, 1.0, spec.fig8_height);
    path.offset_ = Vec3::Zero();
    const Vec3 center = uniform_box(rng, spec.fig8_center_min, spec.fig8_center_max);
    const Vec3 axis = random_unit(rng);
    const double tilt = spec.tilt_angle.value_or(uniform(rng, 0.0, spec.tilt_max));
    path.center_ = spec.center.value_or(center);
    path.rotation_ = Eigen::AngleAxisd(tilt, axis).toRotationMatrix() * rotation_z(spec.base_yaw);
  } else {
    const RawBounds& b = knot_bounds();
    const Vec3 extent = b.hi - b.lo;
    path.scale_ = Vec3::Constant(spec.knot_size).cwiseQuotient(extent);
    path.offset_ = -0.5 * (b.hi + b.lo);
    const Vec3 center = uniform_box(rng, spec.region_center - 0.5 * spec.region_extent,
                                    spec.region_center + 0.5 * spec.region_extent);
    path.center_ = spec.center.value_or(center);
    path.rotation_ = Mat3::Identity();
  }

  // Cumulative arc length, Simpson per segment.
  const int n = TargetPath::kArcSamples;
  const double h = 2.0 * kPi / n;
  path.arc_.resize(static_cast<std::size_t>(n) + 1);
  path.arc_[0] = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = k * h;
    const double f0 = path.local_tangent(a).norm();
    const double f1 = path.local_tangent(a + 0.5 * h).norm();
    const double f2 = path.local_tangent(a + h).norm();
    path.arc_[static_cast<std::size_t>(k) + 1] = path.arc_[static_cast<std::size_t>(k)] + h / 6.0 * (f0 + 4.0 * f1 + f2);
  }
  path.length_ = path.arc_.back();
  path.sign_ = spec.reverse ? -1.0 : 1.0;
  const double phase = uniform(rng, 0.0, 1.0);
  path.phase_s_ = spec.phase ? *spec.phase * path.length_ : (spec.random_phase ? phase * path.length_ : 0.0);
  return path;
}

void write_path_csv(const TargetPath& path, double duration, double dt, std::ostream& os) {
  if (!(dt > 0.0)) throw std::invalid_argument("preview step must be positive");
  os << "t,x,y,z\n" << std::setprecision(9);
  const auto n = static_cast<long>(std::floor(duration / dt + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double t = i * dt;
    const Vec3 p = path.sample(t).position;
    os << t << ',' << p.x() << ',' << p.y() << ',' << p.z() << '\n';
  }
}

}  // namespace losguide
