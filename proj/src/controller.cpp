#include "affdrive/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affdrive {

std::string_view to_string(LongitudinalState s) {
  switch (s) {
    case LongitudinalState::cruising: return "cruising";
    case LongitudinalState::following: return "following";
    case LongitudinalState::over_limit: return "over_limit";
    case LongitudinalState::red_light: return "red_light";
    case LongitudinalState::hazard_stop: return "hazard_stop";
  }
  return "cruising";
}

double pid_step(const PidGains& gains, PidState& state, double error, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step requires dt > 0");
  state.integral = std::clamp(state.integral + error * dt, -state.integral_limit, state.integral_limit);
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;
  return gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
}

PidGains ziegler_nichols_gains(double ku, double tu) {
  if (!(ku > 0.0) || !(tu > 0.0)) throw std::invalid_argument("Ziegler-Nichols needs Ku > 0 and Tu > 0");
  return {0.6 * ku, tu / 2.0, tu / 8.0};
}

PidGains ziegler_nichols_classic_gains(double ku, double tu) {
  if (!(ku > 0.0) || !(tu > 0.0)) throw std::invalid_argument("Ziegler-Nichols needs Ku > 0 and Tu > 0");
  return {0.6 * ku, 1.2 * ku / tu, 0.075 * ku * tu};
}

double car_following_error(double v, double v_max, double gap, double c, double d) {
  if (!(v_max > 0.0)) throw std::invalid_argument("car_following_error requires v_max > 0");
  return v_max * (1.0 - std::exp(-(c / v_max) * gap) - d) - v;
}

std::optional<double> car_following_equilibrium_gap(double v, double v_max, double c, double d) {
  if (!(v_max > 0.0)) throw std::invalid_argument("car_following_equilibrium_gap requires v_max > 0");
  const double rest = 1.0 - d - v / v_max;  // exp(-(c / v_max) gap)
  if (!(rest > 0.0) || rest > 1.0) return std::nullopt;
  return -std::log(rest) * v_max / c;
}

double stanley_steering(double psi, double d, double v, double k, double v_eps) {
  return psi + std::atan(k * d / std::max(v, v_eps));
}

double damped_steering(double delta_sc, double delta_prev, double damping, double steer_limit) {
  const double delta = delta_sc - damping * (delta_sc - delta_prev);
  return std::clamp(delta, -steer_limit, steer_limit);
}

int update_speed_limit_memory(int memory_kmh, std::optional<int> perceived_sign) {
  return perceived_sign ? *perceived_sign : memory_kmh;
}

void ControllerConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  check(p_red_threshold >= 0.0 && p_red_threshold <= 1.0, "p_red_threshold must be in [0, 1]");
  check(p_hazard_threshold >= 0.0 && p_hazard_threshold <= 1.0, "p_hazard_threshold must be in [0, 1]");
  check(follow_trigger > 0.0, "follow_trigger must be positive");
  check(over_limit_margin >= 0.0, "over_limit_margin must be non-negative");
  check(turn_speed_reduction >= 0.0 && turn_speed_reduction < 30.0,
        "turn_speed_reduction must be in [0, 30)");
  check(!cruise_cap || *cruise_cap > 0.0, "cruise_cap must be positive");
  check(following_c > 0.0, "following_c must be positive");
  check(following_d >= 0.0 && following_d < 1.0, "following_d must be in [0, 1)");
  check(stanley_k >= 0.0, "stanley_k must be non-negative");
  check(stanley_v_eps > 0.0, "stanley_v_eps must be positive");
  check(damping >= 0.0 && damping <= 1.0, "damping must be in [0, 1]");
  check(steer_limit > 0.0, "steer_limit must be positive");
  check(integral_limit > 0.0, "integral_limit must be positive");
  check(cruise_gains.kp >= 0.0 && follow_gains.kp >= 0.0, "kp must be non-negative");
  for (double g : {cruise_gains.kp, cruise_gains.ki, cruise_gains.kd, follow_gains.kp, follow_gains.ki,
                   follow_gains.kd}) {
    check(std::isfinite(g), "PID gains must be finite");
  }
}

LongitudinalState select_state(const PerceivedAffordances& p, double v, int limit_kmh,
                               const ControllerConfig& cfg) {
  if (p.p_hazard > cfg.p_hazard_threshold) return LongitudinalState::hazard_stop;
  if (p.p_red > cfg.p_red_threshold) return LongitudinalState::red_light;
  if (v > (limit_kmh + cfg.over_limit_margin) / 3.6) return LongitudinalState::over_limit;
  if (p.values.vehicle_distance < cfg.follow_trigger) return LongitudinalState::following;
  return LongitudinalState::cruising;
}

double cruise_target_kmh(int limit_kmh, Command command, const ControllerConfig& cfg) {
  double target = limit_kmh;
  if (cfg.cruise_cap) target = std::min(target, *cfg.cruise_cap);
  if (command != Command::straight) target = std::min(target, limit_kmh - cfg.turn_speed_reduction);
  return target;
}

double over_limit_brake(double v_kmh, double target_kmh) { return 0.3 * v_kmh / target_kmh; }

double red_light_brake(double v_kmh) { return 0.2 * v_kmh / 30.0; }

PedalCommand longitudinal_command(LongitudinalState state, const PerceivedAffordances& p, double v,
                                  int limit_kmh, Command command, const ControllerConfig& cfg,
                                  PidState& cruise_pid, PidState& follow_pid, double dt) {
  const double target_kmh = cruise_target_kmh(limit_kmh, command, cfg);
  PedalCommand out;
  switch (state) {
    case LongitudinalState::cruising: {
      const double u = pid_step(cfg.cruise_gains, cruise_pid, target_kmh / 3.6 - v, dt);
      out.throttle = std::clamp(u, 0.0, 1.0);
      break;
    }
    case LongitudinalState::following: {
      const double e = car_following_error(v, target_kmh / 3.6, p.values.vehicle_distance, cfg.following_c,
                                           cfg.following_d);
      const double u = pid_step(cfg.follow_gains, follow_pid, e, dt);
      out.throttle = std::clamp(u, 0.0, 1.0);
      if (cfg.follow_brake) out.brake = std::clamp(-u, 0.0, 1.0);
      break;
    }
    case LongitudinalState::over_limit:
      out.brake = std::clamp(over_limit_brake(v * 3.6, target_kmh), 0.0, 1.0);
      break;
    case LongitudinalState::red_light:
      out.brake = std::clamp(red_light_brake(v * 3.6), 0.0, 1.0);
      break;
    case LongitudinalState::hazard_stop:
      out.brake = 1.0;
      break;
  }
  return out;
}

Controller::Controller(ControllerConfig cfg, int initial_limit_kmh)
    : cfg_(std::move(cfg)), limit_kmh_(initial_limit_kmh) {
  cfg_.validate();
  cruise_pid_.integral_limit = cfg_.integral_limit;
  follow_pid_.integral_limit = cfg_.integral_limit;
}

ControlOutput Controller::step(const PerceivedAffordances& p, double v, Command command, double dt) {
  limit_kmh_ = update_speed_limit_memory(limit_kmh_, p.values.speed_sign);
  const LongitudinalState next = select_state(p, v, limit_kmh_, cfg_);
  if (next != state_) {
    if (next != LongitudinalState::cruising) cruise_pid_.reset();
    if (next != LongitudinalState::following) follow_pid_.reset();
    state_ = next;
  }
  const PedalCommand pedals =
      longitudinal_command(state_, p, v, limit_kmh_, command, cfg_, cruise_pid_, follow_pid_, dt);

  // Positive d / psi mean the car sits left of / points left of the path, so
  // the law is evaluated on the path-relative errors to steer back.
  const double delta_sc = stanley_steering(-p.values.relative_angle, -p.values.center_distance, v,
                                           cfg_.stanley_k, cfg_.stanley_v_eps);
  const double steer = damped_steering(delta_sc, prev_steer_, cfg_.damping, cfg_.steer_limit);
  prev_steer_ = steer;
  return {pedals.throttle, pedals.brake, steer, state_};
}

}  // namespace affdrive
