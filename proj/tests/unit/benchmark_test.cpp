#include "doctest.h"

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>

#include "affdrive/benchmark.hpp"

using namespace affdrive;

TEST_CASE("aggregation does not depend on record order") {
  SuiteSpec suite;
  suite.tasks = {Task::straight, Task::one_turn};
  suite.tiers = {"clean", "test"};
  suite.episodes = 3;
  suite.parallel = 4;
  const BenchmarkReport report = run_benchmark(suite);
  REQUIRE(report.episodes.size() == 12);
  CHECK(report.cells.size() == 4);
  const std::string text = format_report_text(report);
  const std::string json = format_report_json(report);

  std::vector<EpisodeRecord> shuffled = report.episodes;
  boost::random::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng() % (i + 1)]);
    BenchmarkReport r2 = report;
    r2.cells = aggregate(suite, shuffled);
    CHECK(format_report_text(r2) == text);
    CHECK(format_report_json(r2) == json);
  }
}

TEST_CASE("cells are ordered task, tier, town") {
  SuiteSpec suite;
  suite.tasks = {Task::straight};
  suite.tiers = {"clean", "train"};
  suite.towns = {"town-a", "town-b"};
  suite.episodes = 1;
  const BenchmarkReport r = run_benchmark(suite);
  REQUIRE(r.cells.size() == 4);
  CHECK(r.cells[0].tier == "clean");
  CHECK(r.cells[0].town == "town-a");
  CHECK(r.cells[1].town == "town-b");
  CHECK(r.cells[2].tier == "train");
  for (const auto& c : r.cells) CHECK(c.episodes == 1);
}

TEST_CASE("thread count does not change the report") {
  SuiteSpec suite;
  suite.tasks = {Task::nav_dynamic};
  suite.tiers = {"test"};
  suite.episodes = 4;
  suite.parallel = 1;
  const std::string serial = format_report_json(run_benchmark(suite));
  suite.parallel = 3;
  CHECK(format_report_json(run_benchmark(suite)) == serial);
}

TEST_CASE("fair mode caps cruising") {
  SuiteSpec suite;
  suite.tasks = {Task::straight};
  suite.episodes = 2;
  suite.fair = true;
  const BenchmarkReport r = run_benchmark(suite);
  CHECK(r.fair);
  CHECK(format_report_text(r).find("20 km/h") != std::string::npos);
}

TEST_CASE("suite validation") {
  SuiteSpec s;
  s.tiers.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = SuiteSpec{};
  s.parallel = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
