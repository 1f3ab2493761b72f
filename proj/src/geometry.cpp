#include "affdrive/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace affdrive {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

Pose2D make_pose(double x, double y, double heading) { return {x, y, wrap_angle(heading)}; }

Pose2D Pose2D::advanced(double ds) const {
  return {x + ds * std::cos(heading), y + ds * std::sin(heading), heading};
}

Vec2 global_to_local(const Pose2D& frame, Vec2 p) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const double dx = p.x - frame.x;
  const double dy = p.y - frame.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 local_to_global(const Pose2D& frame, Vec2 p) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * p.x - s * p.y, frame.y + s * p.x + c * p.y};
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

double point_segment_distance(Vec2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double l2 = dot(d, d);
  if (l2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / l2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[j];
    const Vec2 b = polygon[i];
    if (orientation(a, b, p) == 0 && on_segment(a, b, p)) return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// --- Polyline -------------------------------------------------------------

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Vec2 a = points_[i - 1];
    const Vec2 b = points_[i];
    if (a == b) throw std::invalid_argument("polyline has repeated consecutive points");
    cumulative_.push_back(cumulative_.back() + distance(a, b));
    soa_.push_back(a.x, a.y, b.x, b.y);
  }
}

double Polyline::segment_heading(std::size_t i) const {
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

namespace {

std::size_t segment_for_arc_length(const std::vector<double>& cumulative, double s) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
  std::size_t i = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
  return std::min(i, cumulative.size() - 2);
}

}  // namespace

Vec2 Polyline::point_at(double s) const {
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_for_arc_length(cumulative_, s);
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / seg_len;
  return points_[i] + t * (points_[i + 1] - points_[i]);
}

double Polyline::heading_at(double s) const {
  return segment_heading(segment_for_arc_length(cumulative_, std::clamp(s, 0.0, length())));
}

PolylineProjection Polyline::project(Vec2 p) const {
  const simd::SegmentHit hit = simd::nearest_segment(soa_.view(), p.x, p.y);
  const std::size_t i = hit.index;
  const Vec2 a = points_[i];
  const Vec2 d = points_[i + 1] - a;
  const Vec2 q = a + hit.t * d;
  const double dist = std::sqrt(hit.dist2);
  const double side = cross(d, p - q);
  PolylineProjection out;
  out.point = q;
  out.heading = std::atan2(d.y, d.x);
  out.offset = side < 0.0 ? -dist : dist;
  out.arc_length = cumulative_[i] + hit.t * (cumulative_[i + 1] - cumulative_[i]);
  out.segment = i;
  return out;
}

PolylineProjection project_brute_force(std::span<const Vec2> points, Vec2 p) {
  PolylineProjection best;
  double best_dist = std::numeric_limits<double>::infinity();
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[i + 1];
    const double len = distance(a, b);
    const Vec2 u = (1.0 / len) * (b - a);
    const double along = std::clamp(dot(p - a, u), 0.0, len);
    const Vec2 q = a + along * u;
    const double dist = distance(p, q);
    if (dist < best_dist) {
      best_dist = dist;
      best.point = q;
      best.heading = std::atan2(b.y - a.y, b.x - a.x);
      best.offset = cross(u, p - q) < 0.0 ? -dist : dist;
      best.arc_length = walked + along;
      best.segment = i;
    }
    walked += len;
  }
  return best;
}

// --- Oriented boxes ---------------------------------------------------------

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 f = half_extents.x * unit_from_heading(heading);
  const Vec2 l = half_extents.y * Vec2{-std::sin(heading), std::cos(heading)};
  return {center + f + l, center - f + l, center - f - l, center + f - l};
}

bool OrientedBox::contains(Vec2 p) const {
  const Vec2 local = global_to_local({center.x, center.y, heading}, p);
  return std::abs(local.x) <= half_extents.x && std::abs(local.y) <= half_extents.y;
}

namespace {

// Projection interval of a box's corners on a unit axis.
std::pair<double, double> project_on_axis(const std::array<Vec2, 4>& corners, Vec2 axis) {
  double lo = dot(corners[0], axis);
  double hi = lo;
  for (std::size_t i = 1; i < 4; ++i) {
    const double v = dot(corners[i], axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const Vec2 axes[4] = {unit_from_heading(a.heading), unit_from_heading(a.heading + kPi / 2),
                        unit_from_heading(b.heading), unit_from_heading(b.heading + kPi / 2)};
  for (const Vec2& axis : axes) {
    const auto [alo, ahi] = project_on_axis(ca, axis);
    const auto [blo, bhi] = project_on_axis(cb, axis);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  if (boxes_overlap(a, b)) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    const Segment ea{ca[i], ca[(i + 1) % 4]};
    const Segment eb{cb[i], cb[(i + 1) % 4]};
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(cb[j], ea));
      best = std::min(best, point_segment_distance(ca[j], eb));
    }
  }
  return best;
}

bool segment_intersects_box(const Segment& s, const OrientedBox& box) {
  const Pose2D frame{box.center.x, box.center.y, box.heading};
  const Vec2 p0 = global_to_local(frame, s.a);
  const Vec2 d = global_to_local(frame, s.b) - p0;
  // Liang-Barsky clip against the closed box.
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {p0.x + box.half_extents.x, box.half_extents.x - p0.x,
                       p0.y + box.half_extents.y, box.half_extents.y - p0.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace affdrive
