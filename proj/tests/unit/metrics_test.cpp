#include "doctest.h"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "affdrive/metrics.hpp"

using namespace affdrive;

TEST_CASE("time limit is the route at 10 km/h") {
  CHECK(time_limit(1000.0) == doctest::Approx(360.0));
  CHECK(time_limit(25.0) == doctest::Approx(9.0));
  CHECK_THROWS(time_limit(0.0));
}

TEST_CASE("km between infractions") {
  const KmBetween none = km_between_infractions(12.5, 0);
  CHECK(none.lower_bound);
  CHECK(none.value == 12.5);
  CHECK(none.str() == ">12.5");
  const KmBetween some = km_between_infractions(12.5, 5);
  CHECK_FALSE(some.lower_bound);
  CHECK(some.value == doctest::Approx(2.5));
  CHECK(some.str() == "2.5");
}

TEST_CASE("median") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS(median({}));
  CHECK(median_centerline_distance({{0.1, 0.3, 0.2}, {1.0}, {0.0, 0.4}}) == doctest::Approx(0.2));
}

TEST_CASE("jerk of known motions") {
  const double dt = 0.05;
  std::vector<MotionSample> s;
  // Constant acceleration, straight: no jerk.
  for (int i = 0; i < 100; ++i) s.push_back({1.0 + 2.0 * i * dt, 0.3, false});
  JerkMetrics j = jerk_metrics(s, dt);
  CHECK(j.rms_long == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(j.rms_lat_straight == doctest::Approx(0.0));
  CHECK(std::isnan(j.rms_lat_turns));

  // Speed sin(t): jerk -sin(t), RMS over many periods 1/sqrt(2).
  s.clear();
  const int n = static_cast<int>(40.0 * kPi / 0.001);
  for (int i = 0; i < n; ++i) s.push_back({std::sin(i * 0.001), 0.0, false});
  j = jerk_metrics(s, 0.001);
  CHECK(j.rms_long == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));

  // Constant speed on a circle: constant lateral acceleration, no lateral jerk.
  s.clear();
  for (int i = 0; i < 100; ++i) s.push_back({5.0, 0.2 * i * dt, true});
  j = jerk_metrics(s, dt);
  CHECK(j.rms_lat_turns == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::isnan(j.rms_lat_straight));
  CHECK_THROWS(jerk_metrics(std::span<const MotionSample>(s.data(), 2), dt));
}

TEST_CASE("jerk does not depend on where the motion happens or which way it points") {
  boost::random::mt19937_64 rng(4);
  boost::random::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<MotionSample> s;
  double v = 5.0, h = 0.0;
  for (int i = 0; i < 400; ++i) {
    v = std::max(0.0, v + 0.1 * u(rng));
    h += 0.02 * u(rng);
    s.push_back({v, h, i % 50 < 20});
  }
  const JerkMetrics base = jerk_metrics(s, 0.05);
  for (double rot : {0.7, -2.0, 3.1}) {
    std::vector<MotionSample> r = s;
    for (auto& m : r) m.heading += rot;
    const JerkMetrics j = jerk_metrics(r, 0.05);
    CHECK(j.rms_long == base.rms_long);
    CHECK(j.rms_lat_straight == doctest::Approx(base.rms_lat_straight).epsilon(1e-9));
    CHECK(j.rms_lat_turns == doctest::Approx(base.rms_lat_turns).epsilon(1e-9));
  }
}

TEST_CASE("pooled jerk equals jerk over the pooled classes") {
  std::vector<MotionSample> a, b;
  for (int i = 0; i < 50; ++i) a.push_back({std::sin(0.1 * i), 0.01 * i * i, false});
  for (int i = 0; i < 70; ++i) b.push_back({std::cos(0.1 * i), 0.02 * i, true});
  JerkAccumulator ab, ba, x, y;
  ab.add(a, 0.05);
  ab.add(b, 0.05);
  x.add(b, 0.05);
  y.add(a, 0.05);
  ba.merge(x);
  ba.merge(y);
  CHECK(ab.rms().rms_long == doctest::Approx(ba.rms().rms_long));
  CHECK(ab.rms().rms_lat_turns == doctest::Approx(jerk_metrics(b, 0.05).rms_lat_turns));
  CHECK(ab.rms().rms_lat_straight == doctest::Approx(jerk_metrics(a, 0.05).rms_lat_straight));
}
