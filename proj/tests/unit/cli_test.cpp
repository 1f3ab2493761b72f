#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "affdrive/cli.hpp"

using namespace affdrive;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("affdrive_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kSource = AFFDRIVE_SOURCE_DIR;

}  // namespace

TEST_CASE("run-episode on the demo scenario writes a trace") {
  const fs::path dir = scratch("demo");
  const Run r = cli({"run-episode", "--scenario", kSource + "/scenarios/demo.yaml", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("demo: success") != std::string::npos);
  const std::string trace = slurp(dir / "trace.csv");
  std::istringstream lines(trace);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header.rfind("step,time_s,x_m", 0) == 0);
  CHECK(std::getline(lines, row));
  CHECK(fs::exists(dir / "result.json"));
  CHECK(fs::exists(dir / "config.yaml"));
}

TEST_CASE("same seed, byte-identical trace") {
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  for (const fs::path& d : {a, b}) {
    const Run r = cli({"run-episode", "--town", "town-b", "--task", "nav_dynamic", "--index", "1", "--seed", "5",
                       "--perception", "test", "--out", d.string()});
    CHECK(r.code != kExitUsage);
  }
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(!slurp(a / "trace.csv").empty());
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"run-episode", "--town", "/nonexistent/town.yaml", "--out", scratch("x").string()}).code == kExitUsage);
  CHECK(cli({"run-episode", "--scenario", "/nonexistent.yaml"}).code == kExitUsage);
  CHECK(cli({"run-episode", "--task", "parking", "--out", scratch("y").string()}).code == kExitUsage);
  CHECK(cli({"run-episode", "--perception", "blurry", "--out", scratch("z").string()}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"config", "dump", "--set", "controller.nope=1"}).code == kExitUsage);
  CHECK(cli({"tune-probe", "--ku", "2"}).code == kExitUsage);
}

TEST_CASE("invalid suite exits with 2") {
  const fs::path dir = scratch("bad_suite");
  fs::create_directories(dir);
  std::ofstream(dir / "suite.yaml") << "name: bad\nepisodes: 2\nlaps: 3\n";
  const Run r = cli({"run-benchmark", "--suite", (dir / "suite.yaml").string(), "--out", (dir / "out").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("laps") != std::string::npos);
}

TEST_CASE("smoke suite produces one cell") {
  const fs::path dir = scratch("smoke");
  const Run r = cli({"run-benchmark", "--suite", kSource + "/suites/smoke.yaml", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("(2/2)") != std::string::npos);
  const std::string json = slurp(dir / "report.json");
  CHECK(json.find("\"cells\"") != std::string::npos);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "suite.yaml"));
}

TEST_CASE("config dump honours precedence") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.yaml") << "controller:\n  stanley_k: 0.7\n  damping: 0.3\n";
  const Run r = cli({"config", "dump", "--config", (dir / "c.yaml").string(), "--set", "controller.damping=0.2",
                     "--set", "controller.damping=0.1", "--cruise-cap", "25"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("stanley_k: 0.7") != std::string::npos);
  CHECK(r.out.find("damping: 0.1") != std::string::npos);
  CHECK(r.out.find("cruise_cap_kmh: 25") != std::string::npos);
}

TEST_CASE("tune-probe prints gains from given Ku and Tu") {
  const Run r = cli({"tune-probe", "--ku", "2", "--tu", "1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("kp 1.2 ki 0.5 kd 0.125") != std::string::npos);
  CHECK(cli({"tune-probe", "--kp-max", "0.001"}).code == kExitEpisodeFailure);
}
