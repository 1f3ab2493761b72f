#include "doctest.h"

#include <filesystem>
#include <string>

#include "affdrive/town_builder.hpp"
#include "affdrive/town_io.hpp"

using namespace affdrive;

namespace {

int load_error_line(const std::string& text) {
  try {
    parse_town(text, "t.yaml");
  } catch (const LoadError& e) {
    return e.line();
  }
  return -1;
}

const char* kSmallTown = R"(town: small
lanes:
  - id: 0
    kind: road
    speed_limit: 30
    centerline: [[0, 0], [50, 0]]
    successors: {straight: 1}
  - id: 1
    kind: road
    speed_limit: 60
    centerline: [[50, 0], [100, 0]]
sidewalks:
  - [[0, -2], [100, -2], [100, -5], [0, -5]]
lights:
  - id: 3
    pose: [50, -3, 3.141592653589793]
    cycle: {green: 5, orange: 1, red: 4}
    stop_line: [[50, 2], [50, -2]]
    trigger_length: 20
    lane: 0
signs:
  - {pose: [60, -3, 3.141592653589793], limit: 60}
)";

}  // namespace

TEST_CASE("built-in towns survive a dump/parse round trip") {
  for (const char* name : {"town-a", "town-b"}) {
    const Town t = builtin_town(name);
    const std::string text = dump_town(t);
    const Town back = parse_town(text, name);
    CHECK(dump_town(back) == text);
    CHECK(back.network->lanes().size() == t.network->lanes().size());
    CHECK(back.lights.size() == t.lights.size());
    CHECK(back.signs.size() == t.signs.size());
  }
}

TEST_CASE("shipped town files equal the built-in towns") {
  const std::filesystem::path dir = AFFDRIVE_SOURCE_DIR "/towns";
  for (const char* name : {"town-a", "town-b"}) {
    const Town file = load_town_file(dir / (std::string(name) + ".yaml"));
    CHECK(dump_town(file) == dump_town(builtin_town(name)));
  }
}

TEST_CASE("town-b differs from town-a") {
  CHECK(dump_town(builtin_town("town-a")) != dump_town(builtin_town("town-b")));
  CHECK(is_builtin_town("town-b"));
  CHECK_FALSE(is_builtin_town("town-c"));
}

TEST_CASE("small town parses") {
  const Town t = parse_town(kSmallTown);
  CHECK(t.network->lanes().size() == 2);
  CHECK(t.network->lane(LaneId{1}).speed_limit_kmh == 60);
  REQUIRE(t.lights.size() == 1);
  CHECK(t.lights[0].lane == LaneId{0});
  CHECK(t.lights[0].cycle.period() == doctest::Approx(10.0));
  CHECK(t.network->on_sidewalk({10, -3}));
  CHECK_FALSE(t.network->on_sidewalk({10, 0}));
}

TEST_CASE("town errors carry the line of the offending node") {
  std::string bad_limit = kSmallTown;
  bad_limit.replace(bad_limit.find("speed_limit: 60"), 15, "speed_limit: 45");
  CHECK(load_error_line(bad_limit) == 10);

  std::string bad_ref = kSmallTown;
  bad_ref.replace(bad_ref.find("straight: 1"), 11, "straight: 9");
  CHECK(load_error_line(bad_ref) == 7);

  std::string bad_sign = kSmallTown;
  bad_sign.replace(bad_sign.find("limit: 60}"), 10, "limit: 50}");
  CHECK(load_error_line(bad_sign) == 22);

  CHECK(load_error_line("town: x\nlanes: [\n") > 0);
  CHECK_THROWS_AS(load_town_file("/nonexistent/town.yaml"), LoadError);
}

TEST_CASE("light cycle phases") {
  LightCycle c{10.0, 3.0, 7.0, 0.0};
  CHECK(c.state_at(0.0) == LightState::green);
  CHECK(c.state_at(10.5) == LightState::orange);
  CHECK(c.state_at(13.0) == LightState::red);
  CHECK(c.state_at(20.0) == LightState::green);
  c.offset = 13.0;
  CHECK(c.state_at(0.0) == LightState::red);
  CHECK(c.state_at(7.0) == LightState::green);
}
