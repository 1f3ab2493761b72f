#pragma once

// Longitudinal state machine with two PID loops and fixed brake laws, plus a
// damped Stanley lateral controller.

#include <optional>
#include <string_view>

#include "affdrive/perception.hpp"
#include "affdrive/town.hpp"

namespace affdrive {

/// Declaration order is priority order, lowest first.
enum class LongitudinalState { cruising, following, over_limit, red_light, hazard_stop };

std::string_view to_string(LongitudinalState s);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;  // false after a reset: the next derivative term is zero
  double integral_limit = 10.0;

  void reset() {
    integral = 0.0;
    prev_error = 0.0;
    has_prev = false;
  }
};

/// u = kp e + ki I + kd (e - e_prev) / dt, with I clamped to the state's limit.
double pid_step(const PidGains& gains, PidState& state, double error, double dt);

/// Tuning rule used by the controller: kp = 0.6 Ku,
/// ki = Tu / 2, kd = Tu / 8. Requires Ku > 0 and Tu > 0.
PidGains ziegler_nichols_gains(double ku, double tu);
/// Textbook form: kp = 0.6 Ku, ki = 1.2 Ku / Tu, kd = 0.075 Ku Tu.
PidGains ziegler_nichols_classic_gains(double ku, double tu);

/// Following-model speed error: v_max (1 - exp(-(c / v_max) l) - d) - v.
double car_following_error(double v, double v_max, double gap, double c, double d);

/// Gap at which the following error vanishes for a leader at `v`; none if
/// v is unreachable (v >= v_max (1 - d)).
std::optional<double> car_following_equilibrium_gap(double v, double v_max, double c, double d);

/// psi + atan(k d / max(v, v_eps)).
double stanley_steering(double psi, double d, double v, double k, double v_eps);

/// delta_sc - D (delta_sc - delta_prev), clamped to +-steer_limit.
double damped_steering(double delta_sc, double delta_prev, double damping, double steer_limit);

int update_speed_limit_memory(int memory_kmh, std::optional<int> perceived_sign);

struct ControllerConfig {
  double p_red_threshold = 0.9;
  double p_hazard_threshold = 0.7;
  double follow_trigger = 35.0;       // m
  double over_limit_margin = 15.0;    // km/h
  double turn_speed_reduction = 10.0; // km/h
  std::optional<double> cruise_cap;   // km/h
  double following_c = 1.25;          // 1/s
  double following_d = 0.05;
  double stanley_k = 1.0;             // 1/s
  double stanley_v_eps = 0.5;         // m/s
  double damping = 0.5;
  double steer_limit = 0.61;          // rad
  double integral_limit = 10.0;
  PidGains cruise_gains{0.5, 0.05, 0.0};
  PidGains follow_gains{0.5, 0.05, 0.0};
  bool follow_brake = true;  // map negative following output to brake

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

LongitudinalState select_state(const PerceivedAffordances& p, double v, int limit_kmh,
                               const ControllerConfig& cfg);

/// Cruising target v*: the limit, reduced by the cap and by the turn
/// reduction when the command is a turn.
double cruise_target_kmh(int limit_kmh, Command command, const ControllerConfig& cfg);

struct PedalCommand {
  double throttle = 0.0;
  double brake = 0.0;
};

/// Unclamped brake laws, exposed for exactness checks.
double over_limit_brake(double v_kmh, double target_kmh);
double red_light_brake(double v_kmh);

PedalCommand longitudinal_command(LongitudinalState state, const PerceivedAffordances& p, double v,
                                  int limit_kmh, Command command, const ControllerConfig& cfg,
                                  PidState& cruise_pid, PidState& follow_pid, double dt);

struct ControlOutput {
  double throttle = 0.0;
  double brake = 0.0;
  double steer = 0.0;  // front wheel angle, rad, positive = left
  LongitudinalState state = LongitudinalState::cruising;
};

/// Per-episode controller: PID states, speed-limit memory and the previous
/// steering angle.
class Controller {
 public:
  Controller(ControllerConfig cfg, int initial_limit_kmh);

  ControlOutput step(const PerceivedAffordances& p, double v, Command command, double dt);

  int speed_limit() const { return limit_kmh_; }
  LongitudinalState state() const { return state_; }
  const PidState& cruise_pid() const { return cruise_pid_; }
  const PidState& follow_pid() const { return follow_pid_; }
  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  int limit_kmh_;
  LongitudinalState state_ = LongitudinalState::cruising;
  PidState cruise_pid_;
  PidState follow_pid_;
  double prev_steer_ = 0.0;
};

}  // namespace affdrive
