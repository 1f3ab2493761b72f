#include "doctest.h"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "affdrive/geometry.hpp"

using namespace affdrive;

namespace {

struct Gen {
  boost::random::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uni(double lo, double hi) { return boost::random::uniform_real_distribution<double>(lo, hi)(rng); }
};

// Samples a box on a 1 cm grid in its own frame.
template <class F>
void raster(const OrientedBox& b, F&& visit) {
  const double step = 0.01;
  const int nx = static_cast<int>(std::ceil(2.0 * b.half_extents.x / step));
  const int ny = static_cast<int>(std::ceil(2.0 * b.half_extents.y / step));
  const Vec2 f = unit_from_heading(b.heading);
  const Vec2 l{-f.y, f.x};
  for (int i = 0; i <= nx; ++i) {
    const double u = -b.half_extents.x + std::min(i * step, 2.0 * b.half_extents.x);
    for (int j = 0; j <= ny; ++j) {
      const double v = -b.half_extents.y + std::min(j * step, 2.0 * b.half_extents.y);
      visit(b.center + u * f + v * l);
    }
  }
}

double raster_distance(const OrientedBox& a, const OrientedBox& b, bool& any_inside) {
  double best = std::numeric_limits<double>::infinity();
  any_inside = false;
  const auto edges = [](const OrientedBox& x) {
    const auto c = x.corners();
    return std::array<Segment, 4>{Segment{c[0], c[1]}, Segment{c[1], c[2]}, Segment{c[2], c[3]},
                                  Segment{c[3], c[0]}};
  };
  const auto eb = edges(b);
  raster(a, [&](Vec2 p) {
    if (b.contains(p)) any_inside = true;
    for (const Segment& s : eb) best = std::min(best, point_segment_distance(p, s));
  });
  const auto ea = edges(a);
  raster(b, [&](Vec2 p) {
    if (a.contains(p)) any_inside = true;
    for (const Segment& s : ea) best = std::min(best, point_segment_distance(p, s));
  });
  return best;
}

}  // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  Gen g(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = g.uni(-50.0, 50.0);
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::remainder(a - w, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("local frame round trip") {
  Gen g(2);
  for (int i = 0; i < 1000; ++i) {
    const Pose2D frame = make_pose(g.uni(-100, 100), g.uni(-100, 100), g.uni(-4, 4));
    const Vec2 p{g.uni(-100, 100), g.uni(-100, 100)};
    const Vec2 q = local_to_global(frame, global_to_local(frame, p));
    CHECK(q.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(p.y).epsilon(1e-12));
    // Local distance equals global distance.
    CHECK(norm(global_to_local(frame, p)) == doctest::Approx(distance(frame.position(), p)));
  }
  const Pose2D north = make_pose(1.0, 2.0, kPi / 2.0);
  const Vec2 ahead = global_to_local(north, {1.0, 5.0});
  CHECK(ahead.x == doctest::Approx(3.0));
  CHECK(ahead.y == doctest::Approx(0.0));
  const Vec2 left = global_to_local(north, {0.0, 2.0});
  CHECK(left.y == doctest::Approx(1.0));
}

TEST_CASE("polyline projection matches the brute-force oracle") {
  Gen g(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pts{{0.0, 0.0}};
    const int n = 2 + static_cast<int>(g.uni(0, 30));
    double h = g.uni(-kPi, kPi);
    for (int i = 0; i < n; ++i) {
      h += g.uni(-0.8, 0.8);
      pts.push_back(pts.back() + g.uni(0.5, 10.0) * unit_from_heading(h));
    }
    const Polyline line(pts);
    for (int q = 0; q < 20; ++q) {
      const Vec2 p{g.uni(-60, 60), g.uni(-60, 60)};
      const PolylineProjection a = line.project(p);
      const PolylineProjection b = project_brute_force(pts, p);
      // Both segments meeting at a vertex are closest when the vertex is.
      if (a.segment != b.segment) {
        CHECK(std::max(a.segment, b.segment) - std::min(a.segment, b.segment) == 1);
        const Vec2 v = pts[std::max(a.segment, b.segment)];
        CHECK(distance(a.point, v) < 1e-9);
      }
      CHECK(distance(p, a.point) == doctest::Approx(distance(p, b.point)).epsilon(1e-12));
      CHECK(a.arc_length == doctest::Approx(b.arc_length).epsilon(1e-9));
      CHECK(a.offset == doctest::Approx(b.offset).epsilon(1e-9));
      CHECK(a.point.x == doctest::Approx(b.point.x).epsilon(1e-9));
      CHECK(a.point.y == doctest::Approx(b.point.y).epsilon(1e-9));
    }
  }
}

TEST_CASE("polyline arc length and offset sign") {
  const Polyline line({{0, 0}, {10, 0}, {10, 10}});
  CHECK(line.length() == doctest::Approx(20.0));
  CHECK(line.point_at(15.0).y == doctest::Approx(5.0));
  CHECK(line.heading_at(15.0) == doctest::Approx(kPi / 2.0));
  CHECK(line.project({5.0, 1.0}).offset == doctest::Approx(1.0));
  CHECK(line.project({5.0, -1.0}).offset == doctest::Approx(-1.0));
  CHECK(line.project({12.0, 5.0}).arc_length == doctest::Approx(15.0));
  CHECK_THROWS(Polyline({{0, 0}}));
}

TEST_CASE("point in polygon counts edges as inside") {
  const std::vector<Vec2> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(point_in_polygon(sq, {1, 1}));
  CHECK(point_in_polygon(sq, {2, 1}));
  CHECK(point_in_polygon(sq, {0, 0}));
  CHECK_FALSE(point_in_polygon(sq, {2.001, 1}));
}

TEST_CASE("segment intersection") {
  CHECK(segments_intersect({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}}));
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{2, 0}, {3, 1}}));
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}}));
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
}

TEST_CASE("box overlap and distance agree with a 1 cm raster") {
  Gen g(4);
  int overlapping = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const OrientedBox a{{0.0, 0.0}, g.uni(-kPi, kPi), {g.uni(0.2, 2.5), g.uni(0.2, 1.2)}};
    const OrientedBox b{{g.uni(-5, 5), g.uni(-5, 5)}, g.uni(-kPi, kPi), {g.uni(0.2, 2.5), g.uni(0.2, 1.2)}};
    bool inside = false;
    const double rd = raster_distance(a, b, inside);
    const bool sat = boxes_overlap(a, b);
    const double d = box_distance(a, b);
    if (inside) {
      CHECK(sat);
      ++overlapping;
    }
    if (sat) {
      CHECK(d == 0.0);
      // A raster can only miss an overlap thinner than its spacing.
      CHECK((inside || rd < 0.02));
    } else {
      CHECK_FALSE(inside);
      CHECK(d > 0.0);
      CHECK(std::abs(d - rd) <= 0.011);
    }
  }
  CHECK(overlapping > 10);
}

TEST_CASE("touching boxes overlap") {
  const OrientedBox a{{0, 0}, 0.0, {1, 1}};
  const OrientedBox b{{2, 0}, 0.0, {1, 1}};
  CHECK(boxes_overlap(a, b));
  CHECK(box_distance(a, b) == 0.0);
  const OrientedBox c{{2.5, 0}, 0.0, {1, 1}};
  CHECK_FALSE(boxes_overlap(a, c));
  CHECK(box_distance(a, c) == doctest::Approx(0.5));
}

TEST_CASE("segment against box") {
  const OrientedBox box{{0, 0}, kPi / 4.0, {1, 0.5}};
  CHECK(segment_intersects_box({{-5, 0}, {5, 0}}, box));
  CHECK(segment_intersects_box({{0, 0}, {0.1, 0.1}}, box));
  CHECK_FALSE(segment_intersects_box({{-5, 3}, {5, 3}}, box));
}
