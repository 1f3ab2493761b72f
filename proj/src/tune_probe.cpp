#include "affdrive/tune_probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace affdrive {

void TuneProbeOptions::validate() const {
  if (!(target_kmh > 0.0)) throw std::invalid_argument("tune probe target speed must be positive");
  if (!(initial_kmh >= 0.0)) throw std::invalid_argument("tune probe initial speed must be non-negative");
  if (!(kp_start > 0.0) || !(kp_max > 0.0)) throw std::invalid_argument("tune probe needs positive kp_start and kp_max");
  if (!(kp_growth > 1.0)) throw std::invalid_argument("tune probe kp_growth must exceed 1");
  if (refine_iterations < 0) throw std::invalid_argument("tune probe refine_iterations must be >= 0");
  if (!(dt > 0.0) || !(window > 0.0) || !(duration >= window)) {
    throw std::invalid_argument("tune probe needs dt > 0 and 0 < window <= duration");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("tune probe tolerance must be positive");
  vehicle.validate();
}

Oscillation detect_oscillation(std::span<const double> error, double dt, double tolerance, double min_amplitude) {
  Oscillation out;
  if (error.size() < 3) return out;
  const double mean = std::accumulate(error.begin(), error.end(), 0.0) / static_cast<double>(error.size());

  // Extrema of the deviation, keeping the largest one per sign run.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < error.size(); ++i) {
    const double prev = error[i - 1] - mean;
    const double cur = error[i] - mean;
    const double next = error[i + 1] - mean;
    const bool is_max = cur > 0.0 && cur >= prev && cur > next;
    const bool is_min = cur < 0.0 && cur <= prev && cur < next;
    if (!is_max && !is_min) continue;
    if (!peaks.empty()) {
      const double last = error[peaks.back()] - mean;
      if ((last > 0.0) == (cur > 0.0)) {
        if (std::abs(cur) > std::abs(last)) peaks.back() = i;
        continue;
      }
    }
    peaks.push_back(i);
  }
  out.peaks = static_cast<int>(peaks.size());
  if (peaks.size() < 3) return out;

  double sum = 0.0;
  for (std::size_t i : peaks) sum += std::abs(error[i] - mean);
  out.amplitude = sum / static_cast<double>(peaks.size());
  // Consecutive alternating peaks are half a period apart.
  out.period = 2.0 * dt * static_cast<double>(peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);

  // The swing is sustained when it neither dies out nor shrinks between the
  // two halves of the window.
  const std::size_t half = error.size() / 2;
  double first = 0.0;
  double second = 0.0;
  int n_first = 0;
  int n_second = 0;
  for (std::size_t i : peaks) {
    const double a = std::abs(error[i] - mean);
    if (i < half) {
      first += a;
      ++n_first;
    } else {
      second += a;
      ++n_second;
    }
  }
  if (n_first == 0 || n_second == 0) return out;
  first /= n_first;
  second /= n_second;
  out.sustained = second >= min_amplitude && second >= (1.0 - tolerance) * first;
  return out;
}

std::vector<double> calibration_errors(double kp, const TuneProbeOptions& o) {
  const double target = o.target_kmh / 3.6;
  Ego ego;
  ego.speed = o.initial_kmh / 3.6;
  const auto steps = static_cast<std::size_t>(std::llround(o.duration / o.dt));
  std::vector<double> errors;
  errors.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double e = target - ego.speed;
    errors.push_back(e);
    const double u = kp * e;
    ego = step_vehicle(ego, std::clamp(u, 0.0, 1.0), 0.0, 0.0, o.vehicle, o.dt);
  }
  return errors;
}

namespace {

Oscillation trial(double kp, const TuneProbeOptions& o) {
  const auto errors = calibration_errors(kp, o);
  const auto n = std::min(errors.size(), static_cast<std::size_t>(std::llround(o.window / o.dt)));
  return detect_oscillation(std::span<const double>(errors).last(n), o.dt, o.tolerance, o.min_amplitude);
}

}  // namespace

TuneProbeResult tune_probe(const TuneProbeOptions& o) {
  o.validate();
  TuneProbeResult r;
  double quiet = 0.0;
  double kp = std::min(o.kp_start, o.kp_max);
  Oscillation found;
  for (;;) {
    ++r.trials;
    found = trial(kp, o);
    if (found.sustained) break;
    quiet = kp;
    if (kp >= o.kp_max) {
      r.message = fmt::format("no sustained oscillation up to kp = {}", o.kp_max);
      return r;
    }
    kp = std::min(kp * o.kp_growth, o.kp_max);
  }

  double loud = kp;
  if (quiet > 0.0) {
    for (int i = 0; i < o.refine_iterations; ++i) {
      const double mid = 0.5 * (quiet + loud);
      ++r.trials;
      const Oscillation osc = trial(mid, o);
      if (osc.sustained) {
        loud = mid;
        found = osc;
      } else {
        quiet = mid;
      }
    }
  }
  r.conclusive = true;
  r.ku = loud;
  r.tu = found.period;
  r.gains = ziegler_nichols_gains(r.ku, r.tu);
  r.classic_gains = ziegler_nichols_classic_gains(r.ku, r.tu);
  r.message = fmt::format("sustained oscillation at kp = {:.4f}, period {:.4f} s, amplitude {:.4f} m/s", r.ku, r.tu,
                          found.amplitude);
  return r;
}

}  // namespace affdrive
