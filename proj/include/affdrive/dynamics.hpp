#pragma once

// Kinematic bicycle model for the ego, scripted actors and light cycling.

#include "affdrive/town.hpp"

namespace affdrive {

struct VehicleParams {
  double wheelbase = 2.7;  // m
  double a_max = 3.0;      // m/s^2 at full throttle
  double b_max = 8.0;      // m/s^2 at full brake
  double drag = 0.02;      // 1/s

  void validate() const;
};

/// One forward-Euler step: speed first (floored at zero), then heading from
/// the new speed, then position along the new heading.
Ego step_vehicle(const Ego& ego, double throttle, double brake, double steer, const VehicleParams& params,
                 double dt);

/// Places every scripted actor where its script puts it at `world.time` and
/// sets each light to its cycle state.
void apply_schedules(WorldState& world);

/// Advances time by dt, then applies scripts and light cycles. The ego is
/// left untouched.
WorldState step_world(const WorldState& world, double dt);

}  // namespace affdrive
