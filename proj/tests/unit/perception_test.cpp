#include "doctest.h"

#include <cmath>
#include <vector>

#include "affdrive/perception.hpp"

using namespace affdrive;

namespace {

Affordances truth_with(double d) {
  Affordances a;
  a.center_distance = d;
  a.vehicle_distance = 20.0;
  a.relative_angle = 0.05;
  return a;
}

}  // namespace

TEST_CASE("clean model is the identity") {
  PerceptionSimulator sim(perception_preset("clean"));
  Affordances t = truth_with(0.7);
  t.red_light = true;
  t.speed_sign = 60;
  for (int i = 0; i < 100; ++i) {
    const PerceivedAffordances p = sim.perceive(t);
    CHECK(p.values == t);
    CHECK(p.p_red == 1.0);
    CHECK(p.p_hazard == 0.0);
  }
}

TEST_CASE("lateral noise statistics") {
  PerceptionModel m = perception_preset("clean");
  m.sigma_d = 0.1;
  m.seed = 99;
  PerceptionSimulator sim(m);
  const int n = 10000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = sim.perceive(truth_with(0.0)).values.center_distance;
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) <= 3.0 * 0.1 / std::sqrt(static_cast<double>(n)));
  CHECK(sd >= 0.09);
  CHECK(sd <= 0.11);
}

TEST_CASE("missed detections never reach the threshold") {
  PerceptionModel m = perception_preset("test");
  m.p_tp_hazard = 0.0;
  m.seed = 5;
  PerceptionSimulator sim(m);
  Affordances t;
  t.hazard_stop = true;
  for (int i = 0; i < 2000; ++i) {
    const PerceivedAffordances p = sim.perceive(t);
    CHECK(p.p_hazard <= 1.0 - m.confidence_lo + 1e-12);
    CHECK_FALSE(p.values.hazard_stop);
  }
}

TEST_CASE("detection rates follow the model") {
  PerceptionModel m = perception_preset("clean");
  m.p_tp_red = 0.8;
  m.p_fp_red = 0.1;
  m.seed = 17;
  PerceptionSimulator sim(m);
  Affordances on;
  on.red_light = true;
  int hits = 0;
  int false_alarms = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) hits += sim.perceive(on).values.red_light;
  for (int i = 0; i < n; ++i) false_alarms += sim.perceive(Affordances{}).values.red_light;
  CHECK(hits / double(n) == doctest::Approx(0.8).epsilon(0.02));
  CHECK(false_alarms / double(n) == doctest::Approx(0.1).epsilon(0.08));
}

TEST_CASE("sign confusion rows") {
  PerceptionModel m = perception_preset("clean");
  m.sign_confusion[2] = {0.0, 0.0, 0.5, 0.5};
  m.seed = 8;
  PerceptionSimulator sim(m);
  Affordances t;
  t.speed_sign = 60;
  int sixty = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = sim.perceive(t).values.speed_sign;
    REQUIRE(s.has_value());
    CHECK((*s == 60 || *s == 90));
    sixty += *s == 60;
  }
  CHECK(sixty / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("latency delays the ground truth by whole steps") {
  PerceptionModel m = perception_preset("clean");
  m.latency_steps = 3;
  PerceptionSimulator sim(m);
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(sim.perceive(truth_with(0.1 * i)).values.center_distance);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == 0.0);  // the first frame fills the buffer
  for (int i = 3; i < 10; ++i) CHECK(out[i] == doctest::Approx(0.1 * (i - 3)));
}

TEST_CASE("outputs are clamped to their ranges") {
  PerceptionModel m = perception_preset("clean");
  m.sigma_d = 5.0;
  m.sigma_ell = 100.0;
  m.seed = 3;
  PerceptionSimulator sim(m);
  for (int i = 0; i < 1000; ++i) {
    const auto v = sim.perceive(truth_with(1.9)).values;
    CHECK(std::abs(v.center_distance) <= kMaxCenterDistance);
    CHECK(v.vehicle_distance >= 0.0);
    CHECK(v.vehicle_distance <= kMaxVehicleDistance);
  }
}

TEST_CASE("same seed, same stream; different seed, different stream") {
  PerceptionModel m = perception_preset("test");
  m.seed = 42;
  PerceptionSimulator a(m), b(m);
  m.seed = 43;
  PerceptionSimulator c(m);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const auto pa = a.perceive(truth_with(0.3));
    const auto pb = b.perceive(truth_with(0.3));
    const auto pc = c.perceive(truth_with(0.3));
    CHECK(pa.values == pb.values);
    CHECK(pa.p_red == pb.p_red);
    differs = differs || !(pa.values == pc.values);
  }
  CHECK(differs);
}

TEST_CASE("model validation") {
  CHECK_THROWS(perception_preset("nope"));
  CHECK(is_perception_preset("train"));
  PerceptionModel m;
  m.sign_confusion[1] = {0.5, 0.5, 0.5, 0.0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = PerceptionModel{};
  m.confidence_lo = 0.9;
  m.confidence_hi = 0.8;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = PerceptionModel{};
  m.sigma_d = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  for (const char* name : {"clean", "train", "test"}) CHECK_NOTHROW(perception_preset(name).validate());
}
