#include "affdrive/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "affdrive/simd/kernels.hpp"

namespace affdrive {

double time_limit(double route_length_m) {
  if (!(route_length_m > 0.0)) throw std::invalid_argument("time_limit requires a positive route length");
  return route_length_m / (kTimeLimitSpeedKmh / 3.6);
}

std::string KmBetween::str() const {
  return lower_bound ? fmt::format(">{}", value) : fmt::format("{}", value);
}

KmBetween km_between_infractions(double total_km, std::size_t count) {
  if (!(total_km >= 0.0)) throw std::invalid_argument("total distance must be non-negative");
  if (count == 0) return {total_km, true};
  return {total_km / static_cast<double>(count), false};
}

namespace {

struct JerkSeries {
  std::vector<double> lon;
  std::vector<double> straight;
  std::vector<double> turn;
};

JerkSeries jerk_series(std::span<const MotionSample> s, double dt) {
  if (s.size() < 3) throw std::invalid_argument("jerk metrics need at least 3 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("jerk metrics need dt > 0");
  JerkSeries out;
  const double dt2 = dt * dt;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    out.lon.push_back((s[i + 1].speed - 2.0 * s[i].speed + s[i - 1].speed) / dt2);
    // Lateral acceleration on the half steps around i.
    const double a_next = 0.5 * (s[i].speed + s[i + 1].speed) * wrap_angle(s[i + 1].heading - s[i].heading) / dt;
    const double a_prev = 0.5 * (s[i - 1].speed + s[i].speed) * wrap_angle(s[i].heading - s[i - 1].heading) / dt;
    const double j = (a_next - a_prev) / dt;
    (s[i].turning ? out.turn : out.straight).push_back(j);
  }
  return out;
}

double rms_or_nan(double sum_sq, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sum_sq / static_cast<double>(n));
}

}  // namespace

JerkMetrics jerk_metrics(std::span<const MotionSample> samples, double dt) {
  JerkAccumulator acc;
  acc.add(samples, dt);
  return acc.rms();
}

void JerkAccumulator::add(std::span<const MotionSample> samples, double dt) {
  const JerkSeries s = jerk_series(samples, dt);
  long_sq += simd::sum_squares(s.lon);
  long_n += s.lon.size();
  straight_sq += simd::sum_squares(s.straight);
  straight_n += s.straight.size();
  turn_sq += simd::sum_squares(s.turn);
  turn_n += s.turn.size();
}

void JerkAccumulator::merge(const JerkAccumulator& o) {
  long_sq += o.long_sq;
  long_n += o.long_n;
  straight_sq += o.straight_sq;
  straight_n += o.straight_n;
  turn_sq += o.turn_sq;
  turn_n += o.turn_n;
}

JerkMetrics JerkAccumulator::rms() const {
  return {rms_or_nan(long_sq, long_n), rms_or_nan(straight_sq, straight_n), rms_or_nan(turn_sq, turn_n)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_centerline_distance(const std::vector<std::vector<double>>& per_episode_abs_d) {
  std::vector<double> medians;
  for (const auto& ep : per_episode_abs_d) {
    if (!ep.empty()) medians.push_back(median(ep));
  }
  return median(std::move(medians));
}

}  // namespace affdrive
