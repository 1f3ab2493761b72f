#include "doctest.h"

#include <sstream>

#include "affdrive/benchmark.hpp"
#include "affdrive/scenarios.hpp"
#include "affdrive/town_io.hpp"

using namespace affdrive;

namespace {

int error_line(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const LoadError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("scenario file") {
  const EpisodeSpec s = parse_scenario(R"(name: t
town: town-a
start: {lane: 0, s: 5, offset: -1}
goal: {lane: 0, s: 70}
speed: 4
seed: 12
actors:
  - id: 3
    kind: pedestrian
    script: {waypoints: [[50, -7], [50, 3]], speed: 1.2, start_time: 2, end: vanish}
lights:
  - id: 0
    cycle: {green: 5, orange: 1, red: 9, offset: 6}
)");
  CHECK(s.name == "t");
  CHECK(s.start.lane == LaneId{0});
  CHECK(s.start.s == 5.0);
  CHECK(s.start_offset == -1.0);
  CHECK(s.goal.s == 70.0);
  CHECK(s.initial_speed == 4.0);
  CHECK(s.seed == 12);
  REQUIRE(s.actors.size() == 1);
  CHECK(s.actors[0].kind == ActorKind::pedestrian);
  CHECK(s.actors[0].script->at_end == ScriptEnd::vanish);
  REQUIRE(s.lights.size() == 1);
  CHECK(s.lights[0].cycle.red == 9.0);
}

TEST_CASE("scenario errors point at the line") {
  CHECK(error_line("town: town-a\nstart: {lane: 0, s: 5}\ngoal: {lane: 999, s: 1}\n") == 3);
  CHECK(error_line("town: town-a\nstart: {lane: 0, s: 500}\ngoal: {lane: 0, s: 1}\n") == 2);
  CHECK(error_line("town: town-a\nstart: {lane: 0}\ngoal: {lane: 0, s: 9}\nlights:\n  - id: 77\n") == 5);
  CHECK_THROWS_AS(parse_scenario("town: nowhere.yaml\nstart: {lane: 0}\ngoal: {lane: 0}\n"), LoadError);
  CHECK_THROWS_AS(load_scenario("/nonexistent.yaml"), LoadError);
}

TEST_CASE("shipped scenarios load") {
  for (const char* name : {"demo", "red-light", "lateral-offset"}) {
    CHECK_NOTHROW(load_scenario(std::string(AFFDRIVE_SOURCE_DIR "/scenarios/") + name + ".yaml"));
  }
}

TEST_CASE("task names") {
  for (Task t : kAllTasks) CHECK(parse_task(to_string(t)) == t);
  CHECK_FALSE(parse_task("parking"));
}

TEST_CASE("suite files") {
  const SuiteSpec s = parse_suite("name: x\ntasks: straight\ntiers: [clean, test]\nepisodes: 3\nfair: true\n");
  CHECK(s.name == "x");
  REQUIRE(s.tasks.size() == 1);
  CHECK(s.tasks[0] == Task::straight);
  CHECK(s.tiers.size() == 2);
  CHECK(s.towns == std::vector<std::string>{"town-a"});
  CHECK(s.episodes == 3);
  CHECK(s.fair);
  CHECK(dump_suite(parse_suite(dump_suite(s))) == dump_suite(s));
  CHECK_THROWS_AS(parse_suite("episodes: 3\nlaps: 2\n"), LoadError);
  CHECK_THROWS_AS(parse_suite("tasks: [drifting]\n"), LoadError);
  CHECK_THROWS(parse_suite("episodes: 0\n"));
  for (const char* name : {"smoke", "desk", "full", "fair"}) {
    CHECK_NOTHROW(load_suite(std::string(AFFDRIVE_SOURCE_DIR "/suites/") + name + ".yaml"));
  }
}

TEST_CASE("trace CSV round trip") {
  EpisodeSpec spec = parse_scenario("town: town-a\nstart: {lane: 0, s: 5}\ngoal: {lane: 0, s: 60}\nspeed: 3\n");
  spec.perception = perception_preset("test");
  spec.seed = 4;
  const EpisodeTrace t = run_episode(spec);
  REQUIRE(t.rows.size() > 10);
  std::stringstream ss;
  write_trace_csv(ss, t.rows);
  const std::string text = ss.str();
  CHECK(text.rfind("step,time_s,", 0) == 0);
  const std::vector<TraceRow> back = read_trace_csv(ss);
  REQUIRE(back.size() == t.rows.size());
  std::stringstream again;
  write_trace_csv(again, back);
  CHECK(again.str() == text);
  CHECK(back.back().pose.x == t.rows.back().pose.x);
  CHECK(back.back().perceived.p_red == t.rows.back().perceived.p_red);
}
