#include "doctest.h"

#include <cmath>
#include <vector>

#include "affdrive/tune_probe.hpp"

using namespace affdrive;

TEST_CASE("oscillation detector") {
  const double dt = 0.05;
  std::vector<double> steady, decaying, flat;
  for (int i = 0; i < 200; ++i) {
    const double t = i * dt;
    steady.push_back(0.5 * std::sin(2.0 * kPi * t / 1.5));
    decaying.push_back(0.5 * std::exp(-0.5 * t) * std::sin(2.0 * kPi * t / 1.5));
    flat.push_back(1e-5 * std::sin(2.0 * kPi * t / 1.5));
  }
  const Oscillation s = detect_oscillation(steady, dt, 0.1, 1e-3);
  CHECK(s.sustained);
  CHECK(s.period == doctest::Approx(1.5).epsilon(0.05));
  CHECK(s.amplitude == doctest::Approx(0.5).epsilon(0.05));
  CHECK_FALSE(detect_oscillation(decaying, dt, 0.1, 1e-3).sustained);
  CHECK_FALSE(detect_oscillation(flat, dt, 0.1, 1e-3).sustained);
}

TEST_CASE("calibration run settles to the proportional offset") {
  const TuneProbeOptions opts;
  const double kp = 0.5;
  const std::vector<double> e = calibration_errors(kp, opts);
  REQUIRE(e.size() > 10);
  CHECK(e.front() == doctest::Approx(3.0 / 3.6).epsilon(0.01));
  // a_max kp e = drag (v* - e) at rest.
  const double target = opts.target_kmh / 3.6;
  const double offset = opts.vehicle.drag * target / (opts.vehicle.a_max * kp + opts.vehicle.drag);
  CHECK(e.back() == doctest::Approx(offset).epsilon(1e-3));
}

TEST_CASE("probe finds the discrete-time stability limit") {
  const TuneProbeOptions opts;
  const TuneProbeResult r = tune_probe(opts);
  REQUIRE(r.conclusive);
  // Loop e' = -a_max kp e - drag v under Euler at dt loses stability when
  // |1 - (a_max kp + drag) dt| = 1.
  const double analytic = (2.0 / opts.dt - opts.vehicle.drag) / opts.vehicle.a_max;
  CHECK(r.ku == doctest::Approx(analytic).epsilon(0.005));
  // Period-2 oscillation at the limit.
  CHECK(r.tu == doctest::Approx(2.0 * opts.dt).epsilon(0.01));
  CHECK(r.gains.kp == doctest::Approx(0.6 * r.ku));
  CHECK(r.gains.ki == doctest::Approx(r.tu / 2.0));
  CHECK(r.gains.kd == doctest::Approx(r.tu / 8.0));
}

TEST_CASE("a ceiling below the limit is inconclusive") {
  TuneProbeOptions opts;
  opts.kp_max = 0.001;
  const TuneProbeResult r = tune_probe(opts);
  CHECK_FALSE(r.conclusive);
  CHECK(r.message.find("no sustained oscillation") != std::string::npos);
  opts.kp_start = -1.0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}
