#include "doctest.h"

#include "affdrive/episode.hpp"
#include "affdrive/infractions.hpp"
#include "affdrive/scenarios.hpp"
#include "../support/scenes.hpp"

using namespace affdrive;
using affdrive::testing::straight_town;

namespace {

// Feeds a scripted ego path through the detector at dt.
std::vector<InfractionEvent> drive(const std::vector<Vec2>& centres, double dt, double debounce) {
  const auto town = straight_town(500.0);
  WorldState prev = make_world(*town, ego_from_front_axle(make_pose(centres[0].x, centres[0].y, 0.0), 0.0));
  InfractionDetector det(debounce);
  std::vector<InfractionEvent> events;
  for (std::size_t i = 1; i < centres.size(); ++i) {
    WorldState now = prev;
    now.time = prev.time + dt;
    now.ego = ego_from_front_axle(make_pose(centres[i].x, centres[i].y, 0.0), 1.0);
    det.observe(prev, now, events);
    prev = now;
  }
  return events;
}

}  // namespace

TEST_CASE("a continuous violation is reported once") {
  // Ten metres along the road, then five seconds with the axle on the sidewalk.
  std::vector<Vec2> path;
  for (int i = 0; i < 20; ++i) path.push_back({10.0 + 0.5 * i, 0.0});
  for (int i = 0; i < 100; ++i) path.push_back({20.0 + 0.05 * i, -4.0});
  auto events = drive(path, 0.05, 2.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == InfractionKind::sidewalk);
  CHECK(events[0].time == doctest::Approx(1.0));

  // Back on the road for 3 s, then onto the sidewalk again: a new event.
  for (int i = 0; i < 60; ++i) path.push_back({25.0 + 0.05 * i, 0.0});
  for (int i = 0; i < 10; ++i) path.push_back({28.0 + 0.05 * i, -4.0});
  events = drive(path, 0.05, 2.0);
  CHECK(events.size() == 2);

  // A 1 s excursion back onto the road is within the debounce window.
  path.resize(120);
  for (int i = 0; i < 20; ++i) path.push_back({25.0 + 0.05 * i, 0.0});
  for (int i = 0; i < 10; ++i) path.push_back({26.0 + 0.05 * i, -4.0});
  events = drive(path, 0.05, 2.0);
  CHECK(events.size() == 1);
}

TEST_CASE("driving in the opposing lane") {
  std::vector<Vec2> path;
  for (int i = 0; i < 40; ++i) path.push_back({10.0 + 0.5 * i, 4.0});
  const auto events = drive(path, 0.05, 2.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == InfractionKind::opposite_lane);
}

TEST_CASE("infraction names round trip") {
  for (InfractionKind k : kAllInfractionKinds) CHECK(parse_infraction_kind(to_string(k)) == k);
  CHECK_FALSE(parse_infraction_kind("speeding"));
}

TEST_CASE("replaying a trace reproduces the online events") {
  const auto town = std::make_shared<const Town>(builtin_town("town-a"));
  int episodes_with_events = 0;
  for (int i = 0; i < 12 && episodes_with_events < 3; ++i) {
    EpisodeSpec spec = generate_episode(town, "town-a", Task::nav_dynamic, i, 3);
    spec.perception = perception_preset("test");
    const EpisodeTrace trace = run_episode(spec);
    if (trace.result.infractions.empty()) continue;
    ++episodes_with_events;
    const WorldState init = initial_world(spec, *town);
    const auto replayed = detect_infractions(trace.rows, init, init.ego.geometry, spec.dt, spec.debounce);
    CHECK(replayed == trace.result.infractions);
  }
  CHECK(episodes_with_events > 0);
}
