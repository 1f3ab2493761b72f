#include "affdrive/benchmark.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "affdrive/config.hpp"
#include "affdrive/town_io.hpp"
#include "yaml_util.hpp"

namespace affdrive {

void SuiteSpec::validate() const {
  if (tasks.empty()) throw std::invalid_argument("suite needs at least one task");
  if (tiers.empty()) throw std::invalid_argument("suite needs at least one perception tier");
  if (towns.empty()) throw std::invalid_argument("suite needs at least one town");
  if (episodes < 1) throw std::invalid_argument("suite needs at least one episode per cell");
  if (parallel < 1) throw std::invalid_argument("parallel must be >= 1");
  controller.validate();
  vehicle.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

namespace {

template <typename T>
std::vector<T> read_list(const std::string& src, const YAML::Node& root, const char* key, std::vector<T> fallback) {
  const YAML::Node n = root[key];
  if (!n) return fallback;
  if (n.IsScalar()) return {yaml::get<T>(src, root, key)};
  if (!n.IsSequence() || n.size() == 0) yaml::fail(src, n, std::string("'") + key + "' must be a non-empty list");
  std::vector<T> out;
  for (const YAML::Node& item : n) {
    try {
      out.push_back(item.as<T>());
    } catch (const YAML::Exception&) {
      yaml::fail(src, item, std::string("bad entry in '") + key + "'");
    }
  }
  return out;
}

}  // namespace

SuiteSpec parse_suite(const std::string& text, const std::string& src) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw LoadError(src, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw LoadError(src, 0, "suite file must be a mapping");
  static const std::set<std::string> known = {"name", "tasks", "tiers", "towns", "episodes", "seed", "fair", "parallel"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) yaml::fail(src, kv.first, "unknown suite key '" + key + "'");
  }

  SuiteSpec s;
  s.name = yaml::get_or<std::string>(src, root, "name", s.name);
  s.tasks.clear();
  std::vector<std::string> all_tasks;
  for (Task t : kAllTasks) all_tasks.emplace_back(to_string(t));
  for (const auto& name : read_list<std::string>(src, root, "tasks", all_tasks)) {
    const auto t = parse_task(name);
    if (!t) yaml::fail(src, root["tasks"], "unknown task '" + name + "'");
    s.tasks.push_back(*t);
  }
  s.tiers = read_list<std::string>(src, root, "tiers", s.tiers);
  s.towns = read_list<std::string>(src, root, "towns", s.towns);
  s.episodes = yaml::get_or<int>(src, root, "episodes", s.episodes);
  s.seed = yaml::get_or<std::uint64_t>(src, root, "seed", s.seed);
  s.fair = yaml::get_or<bool>(src, root, "fair", s.fair);
  s.parallel = yaml::get_or<unsigned>(src, root, "parallel", s.parallel);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw LoadError(src, 0, e.what());
  }
  return s;
}

SuiteSpec load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open suite file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_suite(ss.str(), path.string());
}

std::string dump_suite(const SuiteSpec& s) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << s.name;
  e << YAML::Key << "tasks" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Task t : s.tasks) e << std::string(to_string(t));
  e << YAML::EndSeq;
  e << YAML::Key << "tiers" << YAML::Value << YAML::Flow << s.tiers;
  e << YAML::Key << "towns" << YAML::Value << YAML::Flow << s.towns;
  e << YAML::Key << "episodes" << YAML::Value << s.episodes;
  e << YAML::Key << "seed" << YAML::Value << s.seed;
  e << YAML::Key << "fair" << YAML::Value << s.fair;
  e << YAML::Key << "parallel" << YAML::Value << s.parallel;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

PerceptionModel resolve_perception(const std::string& name_or_path) {
  if (is_perception_preset(name_or_path)) return perception_preset(name_or_path);
  return load_perception_model(name_or_path);
}

namespace {


std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
  const auto it = std::find(v.begin(), v.end(), s);
  if (it == v.end()) throw std::invalid_argument("record outside the suite: " + s);
  return static_cast<std::size_t>(it - v.begin());
}

std::size_t task_index(const SuiteSpec& suite, Task t) {
  const auto it = std::find(suite.tasks.begin(), suite.tasks.end(), t);
  if (it == suite.tasks.end()) throw std::invalid_argument("record outside the suite: " + std::string(to_string(t)));
  return static_cast<std::size_t>(it - suite.tasks.begin());
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

EpisodeRecord run_one(const SuiteSpec& suite, const std::shared_ptr<const Town>& town, const std::string& town_name,
                      const std::string& tier, const PerceptionModel& model, Task task, int index,
                      const BenchmarkHooks& hooks) {
  EpisodeRecord rec;
  rec.task = task;
  rec.tier = tier;
  rec.town = town_name;
  rec.index = index;
  EpisodeSpec spec;
  try {
    spec = generate_episode(town, town_name, task, index, suite.seed);
  } catch (const std::exception& e) {
    rec.name = fmt::format("{}-{}-{:02}", to_string(task), town_name, index);
    rec.result.success = false;
    rec.result.termination = Termination::no_route;
    rec.result.message = e.what();
    return rec;
  }
  rec.name = spec.name;
  spec.perception = model;
  spec.controller = suite.controller;
  if (suite.fair) {
    spec.controller.cruise_cap =
        spec.controller.cruise_cap ? std::min(*spec.controller.cruise_cap, kFairCruiseCapKmh) : kFairCruiseCapKmh;
  }
  spec.vehicle = suite.vehicle;
  spec.dt = suite.dt;
  spec.goal_radius = suite.goal_radius;
  spec.activation_distance = suite.activation_distance;
  spec.debounce = suite.debounce;

  EpisodeTrace trace;
  try {
    trace = run_episode(spec);
  } catch (const std::exception& e) {
    rec.result.success = false;
    rec.result.message = e.what();
    return rec;
  }
  rec.result = trace.result;

  if (trace.rows.size() >= 3) {
    std::vector<MotionSample> samples;
    samples.reserve(trace.rows.size());
    for (const TraceRow& r : trace.rows) {
      samples.push_back({r.speed, r.pose.heading, r.command != Command::straight});
    }
    rec.jerk.add(samples, spec.dt);
  }
  if (!trace.rows.empty()) {
    std::vector<double> abs_d;
    abs_d.reserve(trace.rows.size());
    for (const TraceRow& r : trace.rows) abs_d.push_back(std::abs(r.truth.center_distance));
    rec.median_abs_d = median(std::move(abs_d));
  }

  if (hooks.trace_dir) {
    const auto file = *hooks.trace_dir / fmt::format("{}_{}_{}_{:02}.csv", to_string(task), sanitize(tier),
                                                     sanitize(town_name), index);
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    write_trace_csv(out, trace.rows);
  }
  return rec;
}

}  // namespace

std::vector<CellSummary> aggregate(const SuiteSpec& suite, const std::vector<EpisodeRecord>& records) {
  std::vector<CellSummary> cells;
  for (Task task : suite.tasks) {
    for (const auto& tier : suite.tiers) {
      for (const auto& town : suite.towns) {
        CellSummary c;
        c.task = task;
        c.tier = tier;
        c.town = town;
        for (InfractionKind k : kAllInfractionKinds) c.infractions[k] = 0;
        cells.push_back(std::move(c));
      }
    }
  }
  const std::size_t ntier = suite.tiers.size();
  const std::size_t ntown = suite.towns.size();

  // Sort per-cell inputs so floating-point sums do not depend on record order.
  std::vector<std::vector<const EpisodeRecord*>> members(cells.size());
  for (const EpisodeRecord& r : records) {
    const std::size_t i =
        (task_index(suite, r.task) * ntier + index_of(suite.tiers, r.tier)) * ntown + index_of(suite.towns, r.town);
    members[i].push_back(&r);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& m = members[i];
    std::sort(m.begin(), m.end(), [](const EpisodeRecord* a, const EpisodeRecord* b) { return a->index < b->index; });
    CellSummary& c = cells[i];
    double meters = 0.0;
    for (const EpisodeRecord* r : m) {
      ++c.episodes;
      if (r->result.success) ++c.successes;
      meters += r->result.distance_m;
      for (const auto& ev : r->result.infractions) ++c.infractions[ev.kind];
      c.jerk.merge(r->jerk);
      if (r->median_abs_d) c.episode_medians.push_back(*r->median_abs_d);
    }
    c.distance_km = meters / 1000.0;
  }
  return cells;
}

BenchmarkReport run_benchmark(const SuiteSpec& suite, const BenchmarkHooks& hooks) {
  suite.validate();
  std::vector<std::shared_ptr<const Town>> towns;
  for (const auto& name : suite.towns) towns.push_back(std::make_shared<const Town>(resolve_town(name)));
  std::vector<PerceptionModel> models;
  for (const auto& tier : suite.tiers) models.push_back(resolve_perception(tier));
  if (hooks.trace_dir) std::filesystem::create_directories(*hooks.trace_dir);

  struct Job {
    Task task;
    std::size_t tier;
    std::size_t town;
    int index;
  };
  std::vector<Job> jobs;
  for (Task task : suite.tasks) {
    for (std::size_t ti = 0; ti < suite.tiers.size(); ++ti) {
      for (std::size_t wi = 0; wi < suite.towns.size(); ++wi) {
        for (int i = 0; i < suite.episodes; ++i) jobs.push_back({task, ti, wi, i});
      }
    }
  }

  std::vector<EpisodeRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& j = jobs[i];
      try {
        records[i] = run_one(suite, towns[j.town], suite.towns[j.town], suite.tiers[j.tier], models[j.tier], j.task,
                             j.index, hooks);
        if (hooks.on_episode) hooks.on_episode(records[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::min<std::size_t>(suite.parallel, jobs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  BenchmarkReport report;
  report.suite = suite.name;
  report.fair = suite.fair;
  report.cells = aggregate(suite, records);
  report.episodes = std::move(records);
  return report;
}

namespace {

std::string fmt_num(double v, int digits) {
  if (std::isnan(v)) return "-";
  return fmt::format("{:.{}f}", v, digits);
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == 0) {
        out += fmt::format("{:<{}}", r[i], width[i]);
      } else {
        out += fmt::format("  {:>{}}", r[i], width[i]);
      }
    }
    out += '\n';
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
  for (const auto& r : rows) line(r);
  return out;
}

// Column label for a (tier, town) pair.
std::string condition(const CellSummary& c) { return c.tier + "/" + c.town; }

std::vector<std::string> conditions(const BenchmarkReport& r) {
  std::vector<std::string> out;
  for (const auto& c : r.cells) {
    const auto label = condition(c);
    if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
  }
  return out;
}

struct Pooled {
  double km = 0.0;
  std::map<InfractionKind, std::size_t> counts;
};

// Infraction distances pool all tasks of a condition.
std::map<std::string, Pooled> pool_by_condition(const BenchmarkReport& r) {
  std::map<std::string, Pooled> out;
  for (const auto& c : r.cells) {
    Pooled& p = out[condition(c)];
    p.km += c.distance_km;
    for (const auto& [k, n] : c.infractions) p.counts[k] += n;
  }
  return out;
}

}  // namespace

std::string format_report_text(const BenchmarkReport& report) {
  const auto conds = conditions(report);
  std::string out = fmt::format("suite: {}{}\n\n", report.suite, report.fair ? " (cruise capped at 20 km/h)" : "");

  out += "Success rate (%) per task and perception tier/town\n";
  {
    std::vector<std::string> header{"task"};
    header.insert(header.end(), conds.begin(), conds.end());
    std::vector<std::vector<std::string>> rows;
    std::vector<Task> tasks;
    for (const auto& c : report.cells) {
      if (std::find(tasks.begin(), tasks.end(), c.task) == tasks.end()) tasks.push_back(c.task);
    }
    for (Task t : tasks) {
      std::vector<std::string> row{std::string(to_string(t))};
      for (const auto& cond : conds) {
        std::string v = "-";
        for (const auto& c : report.cells) {
          if (c.task == t && condition(c) == cond) {
            v = fmt::format("{} ({}/{})", fmt_num(c.success_percent(), 0), c.successes, c.episodes);
          }
        }
        row.push_back(v);
      }
      rows.push_back(std::move(row));
    }
    out += table(header, rows);
  }

  out += "\nKm driven between infractions (all tasks pooled; '>' = none occurred)\n";
  {
    const auto pooled = pool_by_condition(report);
    std::vector<std::string> header{"infraction"};
    header.insert(header.end(), conds.begin(), conds.end());
    std::vector<std::vector<std::string>> rows;
    for (InfractionKind k : kAllInfractionKinds) {
      std::vector<std::string> row{std::string(to_string(k))};
      for (const auto& cond : conds) {
        const Pooled& p = pooled.at(cond);
        const auto it = p.counts.find(k);
        const KmBetween kb = km_between_infractions(p.km, it == p.counts.end() ? 0 : it->second);
        row.push_back((kb.lower_bound ? ">" : "") + fmt_num(kb.value, 3));
      }
      rows.push_back(std::move(row));
    }
    std::vector<std::string> total{"km driven"};
    for (const auto& cond : conds) total.push_back(fmt_num(pooled.at(cond).km, 3));
    rows.push_back(std::move(total));
    out += table(header, rows);
  }

  out += "\nDriving behaviour per task and perception tier/town\n";
  {
    std::vector<std::string> header{"task",          "condition",           "median |d| (m)", "rms jerk long (m/s^3)",
                                    "rms jerk lat straight (m/s^3)", "rms jerk lat turns (m/s^3)"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : report.cells) {
      const JerkMetrics j = c.jerk.rms();
      const double med = c.episode_medians.empty() ? std::nan("") : median(c.episode_medians);
      rows.push_back({std::string(to_string(c.task)), condition(c), fmt_num(med, 3), fmt_num(j.rms_long, 3),
                      fmt_num(j.rms_lat_straight, 3), fmt_num(j.rms_lat_turns, 3)});
    }
    out += table(header, rows);
  }
  return out;
}

namespace {

nlohmann::ordered_json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string format_report_json(const BenchmarkReport& report) {
  using nlohmann::ordered_json;
  ordered_json root;
  root["suite"] = report.suite;
  root["fair"] = report.fair;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["task"] = std::string(to_string(c.task));
    cell["tier"] = c.tier;
    cell["town"] = c.town;
    cell["episodes"] = c.episodes;
    cell["successes"] = c.successes;
    cell["success_percent"] = c.success_percent();
    cell["distance_km"] = c.distance_km;
    ordered_json inf;
    for (InfractionKind k : kAllInfractionKinds) {
      const auto it = c.infractions.find(k);
      const std::size_t n = it == c.infractions.end() ? 0 : it->second;
      const KmBetween kb = km_between_infractions(c.distance_km, n);
      inf[std::string(to_string(k))] = {{"count", n}, {"km_between", kb.value}, {"lower_bound", kb.lower_bound}};
    }
    cell["infractions"] = std::move(inf);
    const JerkMetrics j = c.jerk.rms();
    cell["median_abs_center_distance_m"] =
        c.episode_medians.empty() ? ordered_json(nullptr) : ordered_json(median(c.episode_medians));
    cell["rms_jerk_long"] = num_or_null(j.rms_long);
    cell["rms_jerk_lat_straight"] = num_or_null(j.rms_lat_straight);
    cell["rms_jerk_lat_turns"] = num_or_null(j.rms_lat_turns);
    cells.push_back(std::move(cell));
  }
  root["cells"] = std::move(cells);

  ordered_json eps = ordered_json::array();
  for (const auto& r : report.episodes) {
    ordered_json e;
    e["task"] = std::string(to_string(r.task));
    e["tier"] = r.tier;
    e["town"] = r.town;
    e["index"] = r.index;
    e["name"] = r.name;
    e["success"] = r.result.success;
    e["termination"] = std::string(to_string(r.result.termination));
    if (!r.result.message.empty()) e["message"] = r.result.message;
    e["distance_m"] = r.result.distance_m;
    e["duration_s"] = r.result.duration_s;
    e["route_length_m"] = r.result.route_length_m;
    e["time_limit_s"] = r.result.time_limit_s;
    e["median_abs_center_distance_m"] = r.median_abs_d ? ordered_json(*r.median_abs_d) : ordered_json(nullptr);
    ordered_json inf = ordered_json::array();
    for (const auto& ev : r.result.infractions) {
      inf.push_back({{"kind", std::string(to_string(ev.kind))},
                     {"time_s", ev.time},
                     {"x_m", ev.position.x},
                     {"y_m", ev.position.y}});
    }
    e["infractions"] = std::move(inf);
    eps.push_back(std::move(e));
  }
  root["episodes"] = std::move(eps);
  return root.dump(2) + "\n";
}

}  // namespace affdrive
