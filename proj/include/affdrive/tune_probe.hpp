#pragma once

// Ultimate-gain probe for the cruise speed loop: raise a pure proportional
// gain on a straight calibration run until the speed error oscillates with a
// steady amplitude, then derive PID gains from (Ku, Tu).

#include <span>
#include <string>
#include <vector>

#include "affdrive/controller.hpp"
#include "affdrive/dynamics.hpp"

namespace affdrive {

struct TuneProbeOptions {
  double target_kmh = 30.0;
  double initial_kmh = 27.0;  // start below the target to excite the loop
  double kp_start = 0.1;
  double kp_max = 100.0;      // sweep ceiling
  double kp_growth = 1.05;    // geometric sweep step
  int refine_iterations = 30; // bisection between the last quiet and first oscillating gain
  double duration = 20.0;     // s per trial
  double window = 10.0;       // s at the end of a trial that is analysed
  double tolerance = 0.1;     // relative spread allowed between peak amplitudes
  double min_amplitude = 1e-3;  // m/s; smaller swings count as settled
  double dt = 0.05;
  VehicleParams vehicle;

  void validate() const;
};

struct Oscillation {
  bool sustained = false;
  int peaks = 0;
  double period = 0.0;     // s
  double amplitude = 0.0;  // mean peak deviation from the window mean
};

/// Peaks are local extrema of the deviation from the window mean. A sustained
/// oscillation has at least 3 sign-alternating peaks, and the mean peak
/// amplitude of the second half of the window is above `min_amplitude` and
/// within `tolerance` of (or above) that of the first half.
Oscillation detect_oscillation(std::span<const double> error, double dt, double tolerance, double min_amplitude);

/// Speed error series of the calibration run under throttle = clamp(kp e, 0, 1),
/// the actuation of the cruising state.
std::vector<double> calibration_errors(double kp, const TuneProbeOptions& options);

struct TuneProbeResult {
  bool conclusive = false;
  double ku = 0.0;
  double tu = 0.0;
  PidGains gains;          // rule used by the controller
  PidGains classic_gains;  // textbook rule, for reference
  int trials = 0;
  std::string message;
};

TuneProbeResult tune_probe(const TuneProbeOptions& options = {});

}  // namespace affdrive
