#include "affdrive/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affdrive {

void VehicleParams::validate() const {
  if (!(wheelbase > 0.0 && a_max > 0.0 && b_max > 0.0)) {
    throw std::invalid_argument("wheelbase, a_max and b_max must be positive");
  }
  if (!(drag >= 0.0)) throw std::invalid_argument("drag must be non-negative");
}

Ego step_vehicle(const Ego& ego, double throttle, double brake, double steer, const VehicleParams& params,
                 double dt) {
  Ego next = ego;
  const double accel = params.a_max * throttle - params.b_max * brake - params.drag * ego.speed;
  next.speed = std::max(0.0, ego.speed + accel * dt);
  const double heading = ego.rear_axle.heading + next.speed / params.wheelbase * std::tan(steer) * dt;
  next.rear_axle.heading = wrap_angle(heading);
  next.rear_axle.x = ego.rear_axle.x + next.speed * dt * std::cos(heading);
  next.rear_axle.y = ego.rear_axle.y + next.speed * dt * std::sin(heading);
  return next;
}

void apply_schedules(WorldState& world) {
  for (TrafficLight& l : world.lights) l.state = l.cycle.state_at(world.time);
  for (Actor& a : world.actors) {
    if (!a.script) continue;
    const ActorScript& s = *a.script;
    const double length = s.path.length();
    const double travelled = std::max(0.0, s.speed * (world.time - s.start_time));
    const double along = std::min(travelled, length);
    const Vec2 p = s.path.point_at(along);
    a.pose = make_pose(p.x, p.y, s.path.heading_at(along));
    const bool moving = world.time >= s.start_time && travelled < length;
    a.speed = moving ? s.speed : 0.0;
    a.active = !(travelled >= length && s.at_end == ScriptEnd::vanish);
  }
}

WorldState step_world(const WorldState& world, double dt) {
  WorldState next = world;
  next.time = world.time + dt;
  apply_schedules(next);
  return next;
}

}  // namespace affdrive
