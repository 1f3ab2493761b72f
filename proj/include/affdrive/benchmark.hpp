#pragma once

// Runs task suites over perception tiers and towns, and aggregates success
// rates, infraction distances and comfort metrics.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affdrive/episode.hpp"
#include "affdrive/metrics.hpp"
#include "affdrive/scenarios.hpp"

namespace affdrive {

inline constexpr int kEpisodesPerCell = 25;
inline constexpr double kFairCruiseCapKmh = 20.0;

struct SuiteSpec {
  std::string name = "desk";
  std::vector<Task> tasks{kAllTasks.begin(), kAllTasks.end()};
  std::vector<std::string> tiers{"clean"};  // perception presets or model files
  std::vector<std::string> towns{"town-a"};
  int episodes = kEpisodesPerCell;
  std::uint64_t seed = 0;
  bool fair = false;  // cap cruising at 20 km/h
  unsigned parallel = 1;

  // Shared by every episode; the tier supplies the perception model.
  ControllerConfig controller;
  VehicleParams vehicle;
  double dt = 0.05;
  double goal_radius = 2.0;
  double activation_distance = kDefaultActivationDistance;
  double debounce = kDefaultDebounce;

  void validate() const;
};

/// Suite files: YAML with the SuiteSpec fields above except the shared
/// controller/vehicle settings, which come from the run configuration.
SuiteSpec parse_suite(const std::string& text, const std::string& source = "<suite>");
SuiteSpec load_suite(const std::filesystem::path& path);
std::string dump_suite(const SuiteSpec& suite);

/// Preset name or path to a perception model file.
PerceptionModel resolve_perception(const std::string& name_or_path);

struct EpisodeRecord {
  Task task = Task::straight;
  std::string tier;
  std::string town;
  int index = 0;
  std::string name;
  EpisodeResult result;
  JerkAccumulator jerk;
  std::optional<double> median_abs_d;  // none for empty traces
};

struct CellSummary {
  Task task = Task::straight;
  std::string tier;
  std::string town;
  int episodes = 0;
  int successes = 0;
  double distance_km = 0.0;
  std::map<InfractionKind, std::size_t> infractions;
  JerkAccumulator jerk;
  std::vector<double> episode_medians;

  double success_percent() const { return episodes ? 100.0 * successes / episodes : 0.0; }
};

struct BenchmarkReport {
  std::string suite;
  bool fair = false;
  std::vector<CellSummary> cells;       // task-major, then tier, then town
  std::vector<EpisodeRecord> episodes;  // same order, then episode index
};

/// Builds cells from records; the result does not depend on record order.
std::vector<CellSummary> aggregate(const SuiteSpec& suite, const std::vector<EpisodeRecord>& records);

struct BenchmarkHooks {
  /// Directory for per-episode trace files; none disables them.
  std::optional<std::filesystem::path> trace_dir;
  std::function<void(const EpisodeRecord&)> on_episode;  // may be called from worker threads
};

BenchmarkReport run_benchmark(const SuiteSpec& suite, const BenchmarkHooks& hooks = {});

/// Aligned text tables: success rates per task, km between infractions per
/// kind, and comfort metrics.
std::string format_report_text(const BenchmarkReport& report);
std::string format_report_json(const BenchmarkReport& report);

}  // namespace affdrive
