#pragma once

// Benchmark metrics: time limits, distance between infractions, jerk and
// centerline distance.

#include <span>
#include <string>
#include <vector>

#include "affdrive/town.hpp"

namespace affdrive {

inline constexpr double kTimeLimitSpeedKmh = 10.0;

/// Time to drive `route_length_m` at 10 km/h. Requires a positive length.
double time_limit(double route_length_m);

/// Distance per infraction, or a lower bound when none occurred.
struct KmBetween {
  double value = 0.0;        // km per infraction, or the total km when none occurred
  bool lower_bound = false;  // printed as ">value"

  std::string str() const;
};

KmBetween km_between_infractions(double total_km, std::size_t count);

/// Per-step motion sample for comfort metrics.
struct MotionSample {
  double speed = 0.0;    // m/s
  double heading = 0.0;  // rad
  bool turning = false;  // a turn command was active
};

struct JerkMetrics {
  double rms_long = 0.0;          // m/s^3
  double rms_lat_straight = 0.0;  // NaN when no straight samples
  double rms_lat_turns = 0.0;     // NaN when no turn samples
};

/// Central differences at spacing dt: longitudinal jerk is the second
/// difference of speed; lateral acceleration v * yaw rate is formed on half
/// steps and differenced once more. Each interior step is classified by its
/// own turning flag. Throws std::invalid_argument for fewer than 3 samples.
JerkMetrics jerk_metrics(std::span<const MotionSample> samples, double dt);

/// Sum of squares accumulated per class, for pooling across episodes.
struct JerkAccumulator {
  double long_sq = 0.0;
  std::size_t long_n = 0;
  double straight_sq = 0.0;
  std::size_t straight_n = 0;
  double turn_sq = 0.0;
  std::size_t turn_n = 0;

  void add(std::span<const MotionSample> samples, double dt);
  void merge(const JerkAccumulator& other);
  JerkMetrics rms() const;
};

/// Median with the mean of the two middle values for even counts. Requires a
/// non-empty input.
double median(std::vector<double> values);

/// Median of per-episode medians of |d|.
double median_centerline_distance(const std::vector<std::vector<double>>& per_episode_abs_d);

}  // namespace affdrive
