#pragma once

// Planar geometry shared by every module: vectors, poses, the ego-local
// frame, polylines and oriented boxes.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "affdrive/simd/kernels.hpp"

namespace affdrive {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }
inline double mps_to_kmh(double mps) { return mps * 3.6; }

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]

  Vec2 position() const { return {x, y}; }
  Vec2 forward() const { return unit_from_heading(heading); }
  Vec2 left() const { return {-std::sin(heading), std::cos(heading)}; }

  /// Pose translated by `ds` along its own heading.
  Pose2D advanced(double ds) const;
};

Pose2D make_pose(double x, double y, double heading);

// Ego-local frame: origin at the given pose, x forward, y to the left.
Vec2 global_to_local(const Pose2D& frame, Vec2 p);
Vec2 local_to_global(const Pose2D& frame, Vec2 p);

struct Segment {
  Vec2 a;
  Vec2 b;
};

bool segments_intersect(const Segment& s, const Segment& t);
double point_segment_distance(Vec2 p, const Segment& s);

/// Even-odd point-in-polygon; points on an edge count as inside.
bool point_in_polygon(std::span<const Vec2> polygon, Vec2 p);

struct PolylineProjection {
  Vec2 point;
  double heading = 0.0;      // tangent of the closest segment
  double offset = 0.0;       // signed, positive to the left of the tangent
  double arc_length = 0.0;   // distance along the polyline to `point`
  std::size_t segment = 0;
};

/// Immutable polyline with cached segment arrays for the projection kernel.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec2& front() const { return points_.front(); }
  const Vec2& back() const { return points_.back(); }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Distance along the polyline to vertex i.
  double arc_length_at(std::size_t i) const { return cumulative_[i]; }
  double segment_heading(std::size_t i) const;

  Vec2 point_at(double s) const;
  double heading_at(double s) const;

  PolylineProjection project(Vec2 p) const;
  simd::SegmentView segments() const { return soa_.view(); }

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
  simd::SegmentArrays soa_;
};

/// Reference projection by exhaustive per-segment evaluation. Independent of
/// the kernels; used by tests as an oracle.
PolylineProjection project_brute_force(std::span<const Vec2> points, Vec2 p);

/// Rectangle with arbitrary orientation, described by centre, heading and
/// half extents (half length along heading, half width across it).
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  Vec2 half_extents;

  std::array<Vec2, 4> corners() const;
  bool contains(Vec2 p) const;
};

/// Separating-axis test; touching boxes overlap.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// Shortest distance between two boxes; zero exactly when they overlap.
double box_distance(const OrientedBox& a, const OrientedBox& b);

/// Segment against box; true if any point of the segment lies in the box.
bool segment_intersects_box(const Segment& s, const OrientedBox& box);

}  // namespace affdrive
