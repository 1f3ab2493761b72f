#include "doctest.h"

#include "affdrive/affordances.hpp"
#include "../support/scenes.hpp"

using namespace affdrive;
using affdrive::testing::straight_town;

namespace {

// Ego with its front axle at (x, y), heading along +x by default.
WorldState world_at(double x, double y, double heading = 0.0) {
  const auto town = straight_town(200.0);
  return make_world(*town, ego_from_front_axle(make_pose(x, y, heading), 5.0));
}

Actor actor_at(ActorKind kind, double x, double y, double heading = 0.0) {
  Actor a;
  a.id = 7;
  a.kind = kind;
  a.pose = make_pose(x, y, heading);
  if (kind == ActorKind::pedestrian) a.half_extents = {0.3, 0.3};
  return a;
}

TrafficLight light_at(double x, double y, LightState state) {
  TrafficLight l;
  l.id = 1;
  l.pose = make_pose(x, y, kPi);  // facing westwards, towards eastbound traffic
  l.state = state;
  return l;
}

}  // namespace

TEST_CASE("observation areas are boundary inclusive") {
  CHECK(point_in_area(kAreaA1, {7.4, -0.8}));
  CHECK(point_in_area(kAreaA1, {14.0, -5.8}));
  CHECK_FALSE(point_in_area(kAreaA1, {14.01, -3.0}));
  CHECK_FALSE(point_in_area(kAreaA1, {10.0, 0.0}));
  CHECK(point_in_area(kAreaA2, {0.0, 2.0}));
  CHECK_FALSE(point_in_area(kAreaA2, {8.3, 0.0}));
  CHECK(point_in_area(kAreaA3, {50.0, -1.6}));
  CHECK_FALSE(point_in_area(kAreaA3, {25.0, 1.7}));
}

TEST_CASE("area placed in the world follows the front axle") {
  const Pose2D front = make_pose(3.0, 4.0, kPi / 2.0);
  const OrientedBox a2 = kAreaA2.to_world(front);
  CHECK(a2.contains({3.0, 8.0}));
  CHECK(a2.contains({4.9, 11.0}));
  CHECK_FALSE(a2.contains({3.0, 3.0}));
  CHECK_FALSE(a2.contains({3.0, 12.5}));
}

TEST_CASE("lane pose affordances") {
  Affordances a = compute_affordances(world_at(20.0, 0.5, 0.1), Command::straight);
  CHECK(a.center_distance == doctest::Approx(0.5));
  CHECK(a.relative_angle == doctest::Approx(0.1));
  a = compute_affordances(world_at(20.0, -1.0), Command::straight);
  CHECK(a.center_distance == doctest::Approx(-1.0));
  a = compute_affordances(world_at(20.0, -3.0), Command::straight);
  CHECK(a.center_distance == doctest::Approx(-kMaxCenterDistance));
  CHECK_THROWS_AS(compute_affordances(world_at(20.0, -30.0), Command::straight), OffRoadError);
}

TEST_CASE("hazard in the stop area") {
  WorldState w = world_at(10.0, 0.0);
  CHECK_FALSE(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::pedestrian, 15.0, 0.0)};
  CHECK(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::pedestrian, 18.4, 0.0)};  // box reaches back to 18.1
  CHECK(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::pedestrian, 19.0, 0.0)};
  CHECK_FALSE(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::pedestrian, 15.0, -2.5)};
  CHECK_FALSE(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::static_object, 15.0, 0.0)};
  CHECK_FALSE(compute_affordances(w, Command::straight).hazard_stop);
  w.actors = {actor_at(ActorKind::pedestrian, 15.0, 0.0)};
  w.actors[0].active = false;
  CHECK_FALSE(compute_affordances(w, Command::straight).hazard_stop);
}

TEST_CASE("vehicle distance is the box gap to the nearest car in the corridor") {
  WorldState w = world_at(10.0, 0.0);
  CHECK(compute_affordances(w, Command::straight).vehicle_distance == kMaxVehicleDistance);
  // Ego bumper at 10.95; leader rear at 30 - 2.3.
  w.actors = {actor_at(ActorKind::vehicle, 30.0, 0.0), actor_at(ActorKind::vehicle, 45.0, 0.0)};
  CHECK(compute_affordances(w, Command::straight).vehicle_distance == doctest::Approx(16.75));
  w.actors = {actor_at(ActorKind::vehicle, 30.0, 4.0, kPi)};  // oncoming lane
  CHECK(compute_affordances(w, Command::straight).vehicle_distance == kMaxVehicleDistance);
  w.actors = {actor_at(ActorKind::vehicle, 80.0, 0.0)};
  CHECK(compute_affordances(w, Command::straight).vehicle_distance == kMaxVehicleDistance);
  w.actors = {actor_at(ActorKind::pedestrian, 30.0, 0.0)};
  CHECK(compute_affordances(w, Command::straight).vehicle_distance == kMaxVehicleDistance);
}

TEST_CASE("speed signs facing the ego in the sign area") {
  WorldState w = world_at(10.0, 0.0);
  SpeedSign s;
  s.pose = make_pose(20.0, -3.0, kPi);
  s.limit_kmh = 60;
  w.signs = {s};
  CHECK(compute_affordances(w, Command::straight).speed_sign == 60);
  w.signs[0].pose.heading = 0.0;  // back of the sign
  CHECK_FALSE(compute_affordances(w, Command::straight).speed_sign.has_value());
  w.signs[0] = s;
  w.signs[0].pose.x = 25.0;
  CHECK_FALSE(compute_affordances(w, Command::straight).speed_sign.has_value());
  SpeedSign nearer = s;
  nearer.pose.x = 18.0;
  nearer.limit_kmh = 90;
  w.signs = {s, nearer};
  CHECK(compute_affordances(w, Command::straight).speed_sign == 90);
}

TEST_CASE("lights: any state but green, facing the ego, in the sign area") {
  WorldState w = world_at(10.0, 0.0);
  w.lights = {light_at(20.0, -3.0, LightState::red)};
  CHECK(compute_affordances(w, Command::straight).red_light);
  w.lights[0].state = LightState::orange;
  CHECK(compute_affordances(w, Command::straight).red_light);
  w.lights[0].state = LightState::green;
  CHECK_FALSE(compute_affordances(w, Command::straight).red_light);
  w.lights = {light_at(20.0, -3.0, LightState::red)};
  w.lights[0].pose.heading = 0.0;
  CHECK_FALSE(compute_affordances(w, Command::straight).red_light);
  // A trigger segment reaching upstream into the area counts although the
  // pole itself is far ahead.
  w.lights = {light_at(40.0, -3.0, LightState::red)};
  CHECK_FALSE(compute_affordances(w, Command::straight).red_light);
  w.lights[0].trigger_length = 25.0;
  CHECK(compute_affordances(w, Command::straight).red_light);
}

TEST_CASE("successor choice substitutes unavailable commands") {
  Lane l;
  l.successors = {{Command::straight, LaneId{5}}};
  auto s = successor_for(l, Command::left);
  REQUIRE(s);
  CHECK(s->first == LaneId{5});
  CHECK(s->second);
  l.successors = {{Command::left, LaneId{6}}, {Command::right, LaneId{7}}};
  s = successor_for(l, Command::straight);
  REQUIRE(s);
  CHECK(s->first == LaneId{7});
  CHECK(s->second);
  s = successor_for(l, Command::left);
  CHECK(s->first == LaneId{6});
  CHECK_FALSE(s->second);
  l.successors.clear();
  CHECK_FALSE(successor_for(l, Command::left));
}
