#include "affdrive/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "affdrive/benchmark.hpp"
#include "affdrive/config.hpp"
#include "affdrive/scenarios.hpp"
#include "affdrive/town_builder.hpp"
#include "affdrive/town_io.hpp"
#include "affdrive/tune_probe.hpp"

namespace affdrive {

namespace {

namespace fs = std::filesystem;

// Raised for anything the operator can fix by changing the command line or
// an input file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<double> cruise_cap;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "YAML run configuration");
  cmd->add_option("--set", o.sets, "Override a configuration key, e.g. controller.stanley_k=0.8 (repeatable)");
  cmd->add_option("--cruise-cap", o.cruise_cap, "Cap the cruising speed (km/h)");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

// Defaults, then the config file, then --set in order, then dedicated flags.
RunConfig merged_config(const CommonOptions& o) {
  RunConfig cfg;
  if (!o.config_file.empty()) {
    if (!fs::exists(o.config_file)) throw UsageError("config file not found: " + o.config_file);
    cfg = load_config(o.config_file);
  }
  for (const auto& s : o.sets) {
    try {
      apply_override(cfg, s);
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("--set {}: {}", s, e.what()));
    }
  }
  if (o.cruise_cap) {
    if (!(*o.cruise_cap > 0.0)) throw UsageError("--cruise-cap must be positive");
    cfg.controller.cruise_cap = *o.cruise_cap;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void check_town(const std::string& town) {
  if (!is_builtin_town(town) && !fs::exists(town)) throw UsageError("town file not found: " + town);
}

PerceptionModel perception_or_usage(const std::string& name) {
  if (!is_perception_preset(name) && !fs::exists(name)) {
    throw UsageError("unknown perception preset or missing model file: " + name);
  }
  return resolve_perception(name);
}

Task task_or_usage(const std::string& name) {
  const auto t = parse_task(name);
  if (!t) throw UsageError("unknown task '" + name + "'");
  return *t;
}

void apply_run_config(EpisodeSpec& spec, const RunConfig& cfg) {
  spec.controller = cfg.controller;
  spec.vehicle = cfg.vehicle;
  spec.perception = cfg.perception;
  spec.dt = cfg.dt;
  spec.goal_radius = cfg.goal_radius;
  spec.activation_distance = cfg.activation_distance;
  spec.debounce = cfg.debounce;
}

std::string summary_line(const std::string& name, const EpisodeResult& r) {
  std::map<InfractionKind, int> counts;
  for (const auto& e : r.infractions) ++counts[e.kind];
  std::string inf;
  for (const auto& [k, n] : counts) inf += fmt::format(" {}={}", to_string(k), n);
  return fmt::format("{}: {} ({}) distance {:.1f} m in {:.1f} s (limit {:.1f} s), infractions {}{}", name,
                     r.success ? "success" : "failure", to_string(r.termination), r.distance_m, r.duration_s,
                     r.time_limit_s, r.infractions.size(), inf);
}

std::string result_json(const std::string& name, const EpisodeSpec& spec, const EpisodeResult& r) {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["town"] = spec.town;
  j["seed"] = spec.seed;
  j["success"] = r.success;
  j["termination"] = std::string(to_string(r.termination));
  if (!r.message.empty()) j["message"] = r.message;
  j["distance_m"] = r.distance_m;
  j["duration_s"] = r.duration_s;
  j["route_length_m"] = r.route_length_m;
  j["time_limit_s"] = r.time_limit_s;
  nlohmann::ordered_json inf = nlohmann::ordered_json::array();
  for (const auto& e : r.infractions) {
    inf.push_back({{"kind", std::string(to_string(e.kind))}, {"time_s", e.time}, {"x_m", e.position.x},
                   {"y_m", e.position.y}});
  }
  j["infractions"] = std::move(inf);
  return j.dump(2) + "\n";
}

// --- run-episode ---------------------------------------------------------------

struct EpisodeOptions {
  CommonOptions common;
  std::string scenario;
  std::string town;
  std::string task = "navigation";
  int index = 0;
  std::optional<std::uint64_t> seed;
  std::string perception;
};

int cmd_run_episode(const EpisodeOptions& o, std::ostream& out) {
  RunConfig cfg = merged_config(o.common);
  if (!o.perception.empty()) cfg.perception = perception_or_usage(o.perception);

  EpisodeSpec spec;
  if (!o.scenario.empty()) {
    if (!o.town.empty()) throw UsageError("--town cannot be combined with --scenario (the scenario names its town)");
    if (!fs::exists(o.scenario)) throw UsageError("scenario file not found: " + o.scenario);
    try {
      spec = load_scenario(o.scenario);
    } catch (const LoadError& e) {
      throw UsageError(e.what());
    }
    if (o.seed) spec.seed = *o.seed;
  } else {
    const std::string town_name = o.town.empty() ? "town-a" : o.town;
    check_town(town_name);
    if (o.index < 0) throw UsageError("--index must be >= 0");
    std::shared_ptr<const Town> town;
    try {
      town = std::make_shared<const Town>(resolve_town(town_name));
    } catch (const LoadError& e) {
      throw UsageError(e.what());
    }
    spec = generate_episode(town, town_name, task_or_usage(o.task), o.index, o.seed.value_or(0));
  }
  const std::uint64_t seed = spec.seed;
  const double time_limit = spec.time_limit;
  apply_run_config(spec, cfg);
  spec.seed = seed;
  spec.time_limit = time_limit;

  const fs::path dir = o.common.out_dir;
  fs::create_directories(dir);
  write_file(dir / "config.yaml", dump_config(cfg));
  const EpisodeTrace trace = run_episode(spec);
  {
    std::ofstream f(dir / "trace.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / "trace.csv").string());
    write_trace_csv(f, trace.rows);
  }
  write_file(dir / "result.json", result_json(spec.name, spec, trace.result));
  out << summary_line(spec.name, trace.result) << "\n";
  return trace.result.success ? kExitOk : kExitEpisodeFailure;
}

// --- run-benchmark -------------------------------------------------------------

struct BenchmarkOptions {
  CommonOptions common;
  std::string suite;
  std::vector<std::string> towns;
  std::vector<std::string> tiers;
  std::vector<std::string> tasks;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> parallel;
  bool fair = false;
  bool traces = false;
};

int cmd_run_benchmark(const BenchmarkOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = merged_config(o.common);
  SuiteSpec suite;
  if (!o.suite.empty()) {
    if (!fs::exists(o.suite)) throw UsageError("suite file not found: " + o.suite);
    try {
      suite = load_suite(o.suite);
    } catch (const LoadError& e) {
      throw UsageError(e.what());
    }
  }
  if (!o.towns.empty()) suite.towns = o.towns;
  if (!o.tiers.empty()) suite.tiers = o.tiers;
  if (!o.tasks.empty()) {
    suite.tasks.clear();
    for (const auto& t : o.tasks) suite.tasks.push_back(task_or_usage(t));
  }
  if (o.episodes) suite.episodes = *o.episodes;
  if (o.seed) suite.seed = *o.seed;
  if (o.parallel) suite.parallel = *o.parallel;
  if (o.fair) suite.fair = true;
  for (const auto& t : suite.towns) check_town(t);
  for (const auto& t : suite.tiers) perception_or_usage(t);
  suite.controller = cfg.controller;
  suite.vehicle = cfg.vehicle;
  suite.dt = cfg.dt;
  suite.goal_radius = cfg.goal_radius;
  suite.activation_distance = cfg.activation_distance;
  suite.debounce = cfg.debounce;
  try {
    suite.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path dir = o.common.out_dir;
  fs::create_directories(dir);
  write_file(dir / "config.yaml", dump_config(cfg));
  write_file(dir / "suite.yaml", dump_suite(suite));
  BenchmarkHooks hooks;
  if (o.traces) hooks.trace_dir = dir / "traces";
  const BenchmarkReport report = run_benchmark(suite, hooks);
  const std::string text = format_report_text(report);
  write_file(dir / "report.txt", text);
  write_file(dir / "report.json", format_report_json(report));
  out << text;
  int failed = 0;
  for (const auto& e : report.episodes) failed += e.result.success ? 0 : 1;
  if (failed) err << failed << " of " << report.episodes.size() << " episodes failed\n";
  return kExitOk;
}

// --- tune-probe ----------------------------------------------------------------

struct ProbeOptions {
  CommonOptions common;
  std::optional<double> ku;
  std::optional<double> tu;
  TuneProbeOptions probe;
};

void print_gains(std::ostream& out, double ku, double tu) {
  const PidGains g = ziegler_nichols_gains(ku, tu);
  const PidGains c = ziegler_nichols_classic_gains(ku, tu);
  out << fmt::format("Ku {} Tu {}\n", ku, tu);
  out << fmt::format("gains: kp {} ki {} kd {}\n", g.kp, g.ki, g.kd);
  out << fmt::format("classic gains: kp {} ki {} kd {}\n", c.kp, c.ki, c.kd);
}

int cmd_tune_probe(ProbeOptions o, std::ostream& out) {
  if (o.ku.has_value() != o.tu.has_value()) throw UsageError("--ku and --tu must be given together");
  if (o.ku) {
    if (!(*o.ku > 0.0) || !(*o.tu > 0.0)) throw UsageError("--ku and --tu must be positive");
    print_gains(out, *o.ku, *o.tu);
    return kExitOk;
  }
  const RunConfig cfg = merged_config(o.common);
  o.probe.vehicle = cfg.vehicle;
  o.probe.dt = cfg.dt;
  try {
    o.probe.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const TuneProbeResult r = tune_probe(o.probe);
  out << fmt::format("{} after {} trials\n", r.message, r.trials);
  if (!r.conclusive) {
    out << "inconclusive\n";
    return kExitEpisodeFailure;
  }
  print_gains(out, r.ku, r.tu);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Affordance-based urban driving: closed-loop episodes and benchmarks", "affdrive");
  app.require_subcommand(1);

  EpisodeOptions ep;
  auto* run_ep = app.add_subcommand("run-episode", "Run one episode and write its trace");
  add_common(run_ep, ep.common);
  run_ep->add_option("--scenario", ep.scenario, "Scenario file");
  run_ep->add_option("--town", ep.town, "Built-in town (town-a, town-b) or town file, for generated episodes");
  run_ep->add_option("--task", ep.task, "Task of a generated episode")->capture_default_str();
  run_ep->add_option("--index", ep.index, "Index of a generated episode")->capture_default_str();
  run_ep->add_option("--seed", ep.seed, "Episode seed (generation and perception noise)");
  run_ep->add_option("--perception", ep.perception, "clean, train, test or a perception model file");

  BenchmarkOptions bm;
  auto* run_bm = app.add_subcommand("run-benchmark", "Run a task suite and write report tables");
  add_common(run_bm, bm.common);
  run_bm->add_option("--suite", bm.suite, "Suite file");
  run_bm->add_option("--town", bm.towns, "Town(s), replacing the suite's (repeatable)");
  run_bm->add_option("--perception", bm.tiers, "Perception tier(s), replacing the suite's (repeatable)");
  run_bm->add_option("--task", bm.tasks, "Task(s), replacing the suite's (repeatable)");
  run_bm->add_option("--episodes", bm.episodes, "Episodes per cell");
  run_bm->add_option("--seed", bm.seed, "Suite seed");
  run_bm->add_option("--parallel", bm.parallel, "Worker threads");
  run_bm->add_flag("--fair", bm.fair, "Cap cruising at 20 km/h");
  run_bm->add_flag("--traces", bm.traces, "Write one trace file per episode");

  ProbeOptions pr;
  auto* probe = app.add_subcommand("tune-probe", "Ultimate-gain probe and Ziegler-Nichols gains");
  add_common(probe, pr.common);
  probe->add_option("--ku", pr.ku, "Ultimate gain; skips the sweep");
  probe->add_option("--tu", pr.tu, "Oscillation period (s); skips the sweep");
  probe->add_option("--kp-start", pr.probe.kp_start, "First gain of the sweep")->capture_default_str();
  probe->add_option("--kp-max", pr.probe.kp_max, "Sweep ceiling")->capture_default_str();
  probe->add_option("--target-kmh", pr.probe.target_kmh, "Calibration speed")->capture_default_str();

  CommonOptions cd;
  auto* config = app.add_subcommand("config", "Configuration utilities");
  config->require_subcommand(1);
  auto* dump = config->add_subcommand("dump", "Print the effective configuration");
  dump->add_option("--config", cd.config_file, "YAML run configuration");
  dump->add_option("--set", cd.sets, "Override a configuration key (repeatable)");
  dump->add_option("--cruise-cap", cd.cruise_cap, "Cap the cruising speed (km/h)");

  std::vector<std::string> storage{"affdrive"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*run_ep) return cmd_run_episode(ep, out);
    if (*run_bm) return cmd_run_benchmark(bm, out, err);
    if (*probe) return cmd_tune_probe(pr, out);
    if (*dump) {
      out << dump_config(merged_config(cd));
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEpisodeFailure;
  }
  return kExitUsage;
}

}  // namespace affdrive
