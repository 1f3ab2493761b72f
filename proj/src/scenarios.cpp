#include "affdrive/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>

#include "affdrive/town_builder.hpp"
#include "affdrive/town_io.hpp"
#include "yaml_util.hpp"

namespace affdrive {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::straight: return "straight";
    case Task::one_turn: return "one_turn";
    case Task::navigation: return "navigation";
    case Task::nav_dynamic: return "nav_dynamic";
  }
  return "straight";
}

std::optional<Task> parse_task(std::string_view s) {
  for (Task t : kAllTasks) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

int count_turns(const Route& route) {
  return static_cast<int>(std::count_if(route.steps.begin(), route.steps.end(),
                                        [](const RouteStep& s) { return s.command != Command::straight; }));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LanePoint lane_point_at(const RoadNetwork& network, Vec2 position, double heading) {
  std::optional<LanePoint> best;
  double best_dist = kOffRoadDistance;
  for (const Lane& l : network.lanes()) {
    if (l.kind != LaneKind::road) continue;
    const PolylineProjection proj = l.centerline.project(position);
    if (std::abs(wrap_angle(proj.heading - heading)) > kPi / 3) continue;
    if (std::abs(proj.offset) <= best_dist) {
      best_dist = std::abs(proj.offset);
      best = LanePoint{l.id, proj.arc_length};
    }
  }
  if (!best) throw OffRoadError("pose is not on a road lane");
  return *best;
}

namespace {

void append_range(std::vector<Vec2>& out, const Polyline& line, double s0, double s1) {
  auto push = [&](Vec2 p) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  };
  push(line.point_at(s0));
  for (std::size_t i = 1; i + 1 < line.size(); ++i) {
    const double s = line.arc_length_at(i);
    if (s > s0 && s < s1) push(line.points()[i]);
  }
  push(line.point_at(s1));
}

}  // namespace

Polyline route_polyline(const RoadNetwork& network, const TopoGraph& graph, const Route& route,
                        const LanePoint& start, const LanePoint& goal) {
  std::vector<Vec2> pts;
  const Polyline& first = network.lane(start.lane).centerline;
  if (route.steps.empty()) {
    append_range(pts, first, start.s, goal.s);
  } else {
    append_range(pts, first, start.s, first.length());
    for (std::size_t k = 0; k < route.steps.size(); ++k) {
      const TopoEdge& e = graph.edges().at(route.steps[k].edge);
      for (std::size_t j = 0; j < e.lanes.size(); ++j) {
        const Polyline& line = network.lane(e.lanes[j]).centerline;
        const bool last = k + 1 == route.steps.size() && j + 1 == e.lanes.size();
        append_range(pts, line, 0.0, last ? goal.s : line.length());
      }
    }
  }
  if (pts.size() < 2) pts.push_back(pts.back() + Vec2{1e-3, 0.0});
  return Polyline(std::move(pts));
}

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * boost::random::uniform_01<double>()(gen_); }
  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(boost::random::uniform_01<double>()(gen_) * static_cast<double>(n));
    return std::min(i, n - 1);
  }

 private:
  boost::random::mt19937_64 gen_;
};

bool task_accepts(Task task, const Route& route) {
  const int turns = count_turns(route);
  switch (task) {
    case Task::straight: return turns == 0 && route.length >= 60.0;
    case Task::one_turn: return turns == 1;
    case Task::navigation:
    case Task::nav_dynamic: return turns >= 2;
  }
  return false;
}

struct Walk {
  int min_hops;
  int max_hops;
  bool straight_only;
};

Walk walk_for(Task task) {
  switch (task) {
    case Task::straight: return {0, 2, true};
    case Task::one_turn: return {1, 2, false};
    case Task::navigation:
    case Task::nav_dynamic: return {3, 6, false};
  }
  return {0, 0, true};
}

void add_dynamic_actors(EpisodeSpec& spec, const RoadNetwork& net, const TopoGraph& graph, const Route& route,
                        Rng& rng) {
  const Polyline path = route_polyline(net, graph, route, spec.start, spec.goal);
  std::int32_t id = 1;

  // A slower lead vehicle ahead on the route.
  const double lead_start = rng.uniform(20.0, 40.0);
  if (path.length() > lead_start + 30.0) {
    std::vector<Vec2> pts;
    append_range(pts, path, lead_start, path.length());
    Actor lead;
    lead.id = id++;
    lead.kind = ActorKind::vehicle;
    lead.script = ActorScript{Polyline(std::move(pts)), rng.uniform(15.0, 25.0) / 3.6, 0.0, ScriptEnd::vanish};
    spec.actors.push_back(lead);
  }

  // Pedestrians crossing route road lanes in front of the ego.
  const double lane_half = 2.0;
  for (int k = 0; k < 2; ++k) {
    const double s = rng.uniform(60.0, std::max(70.0, path.length() - 20.0));
    if (s >= path.length()) continue;
    const Vec2 at = path.point_at(s);
    const double heading = path.heading_at(s);
    const Vec2 left = unit_from_heading(heading + kPi / 2);
    Actor ped;
    ped.id = id++;
    ped.kind = ActorKind::pedestrian;
    ped.half_extents = {0.3, 0.3};
    const Vec2 from = at - (lane_half + 1.5) * left;
    const Vec2 to = at + (3.0 * lane_half + 1.5) * left;
    // Aim to cross roughly when the ego (about 7 m/s) gets there.
    const double start_time = std::max(0.0, s / 7.0 - rng.uniform(2.0, 8.0));
    ped.script = ActorScript{Polyline({from, to}), rng.uniform(1.0, 1.6), start_time, ScriptEnd::vanish};
    spec.actors.push_back(ped);
  }
}

}  // namespace

EpisodeSpec generate_episode(const std::shared_ptr<const Town>& town, const std::string& town_name, Task task,
                             int index, std::uint64_t seed) {
  const RoadNetwork& net = *town->network;
  const TopoGraph graph = build_topo_graph(net);
  std::vector<LaneId> roads;
  for (const Lane& l : net.lanes()) {
    if (l.kind == LaneKind::road) roads.push_back(l.id);
  }
  Rng rng(mix_seed(seed, (static_cast<std::uint64_t>(task) << 32) | static_cast<std::uint32_t>(index)));
  const Walk walk = walk_for(task);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const LaneId start = roads[rng.index(roads.size())];
    const double start_len = net.lane(start).centerline.length();
    const double s0 = rng.uniform(0.1, 0.5) * start_len;
    const int hops = walk.min_hops + static_cast<int>(rng.index(walk.max_hops - walk.min_hops + 1));

    LaneId cur = start;
    bool ok = true;
    for (int h = 0; h < hops && ok; ++h) {
      std::vector<std::size_t> options;
      for (std::size_t ei : graph.out_edges(cur.value)) {
        if (!walk.straight_only || graph.edges()[ei].command == Command::straight) options.push_back(ei);
      }
      if (options.empty()) {
        ok = false;
        break;
      }
      cur = LaneId{graph.edges()[options[rng.index(options.size())]].to};
    }
    if (!ok) continue;
    const double goal_len = net.lane(cur).centerline.length();
    double g = rng.uniform(0.3, 0.8) * goal_len;
    if (cur == start && g <= s0 + 20.0) continue;

    Route route;
    try {
      route = plan_lane_route(graph, net, start, s0, cur, g);
    } catch (const NoRouteError&) {
      continue;
    }
    if (!task_accepts(task, route)) continue;

    EpisodeSpec spec;
    spec.name = std::string(to_string(task)) + "-" + std::to_string(index);
    spec.town = town_name;
    spec.town_data = town;
    spec.start = {start, s0};
    spec.goal = {cur, g};
    spec.seed = mix_seed(seed, 0x5eedULL + static_cast<std::uint64_t>(index));
    if (task == Task::nav_dynamic) add_dynamic_actors(spec, net, graph, route, rng);
    return spec;
  }
  throw std::runtime_error("could not generate a '" + std::string(to_string(task)) + "' episode in " +
                           town_name);
}

// --- scenario files ----------------------------------------------------------

namespace {

LanePoint parse_lane_point(const std::string& src, const YAML::Node& n, const RoadNetwork& net) {
  if (!n || !n.IsMap()) yaml::fail(src, n, "expected a mapping with lane/s or pose");
  if (n["pose"]) {
    const Pose2D p = yaml::pose(src, n["pose"]);
    try {
      return lane_point_at(net, p.position(), p.heading);
    } catch (const OffRoadError& e) {
      yaml::fail(src, n["pose"], e.what());
    }
  }
  const LaneId lane{yaml::get<std::int32_t>(src, n, "lane")};
  if (!net.contains(lane)) yaml::fail(src, n["lane"], "unknown lane " + std::to_string(lane.value));
  if (net.lane(lane).kind != LaneKind::road) yaml::fail(src, n["lane"], "start and goal must be on road lanes");
  const double s = yaml::get_or<double>(src, n, "s", 0.0);
  if (s < 0.0 || s > net.lane(lane).centerline.length()) yaml::fail(src, n["s"], "s outside the lane");
  return {lane, s};
}

}  // namespace

EpisodeSpec parse_scenario(const std::string& text, const std::string& src, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw LoadError(src, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw LoadError(src, 0, "scenario file must be a mapping");
  EpisodeSpec spec;
  spec.name = yaml::get_or<std::string>(src, root, "name", "scenario");
  spec.town = yaml::get_or<std::string>(src, root, "town", "town-a");
  try {
    std::string where = spec.town;
    if (!is_builtin_town(where) && !base_dir.empty() && std::filesystem::path(where).is_relative() &&
        std::filesystem::exists(base_dir / where)) {
      where = (base_dir / where).string();
    }
    spec.town_data = std::make_shared<const Town>(resolve_town(where));
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception& e) {
    yaml::fail(src, root["town"] ? root["town"] : root, e.what());
  }
  const RoadNetwork& net = *spec.town_data->network;
  spec.start = parse_lane_point(src, root["start"], net);
  spec.goal = parse_lane_point(src, root["goal"], net);
  spec.start_offset = yaml::get_or<double>(src, root["start"], "offset", 0.0);
  spec.initial_speed = yaml::get_or<double>(src, root, "speed", 0.0);
  spec.seed = yaml::get_or<std::uint64_t>(src, root, "seed", 0);
  spec.time_limit = yaml::get_or<double>(src, root, "time_limit", 0.0);
  if (const YAML::Node actors = root["actors"]) {
    for (const YAML::Node& a : actors) spec.actors.push_back(yaml::actor(src, a));
  }
  if (const YAML::Node lights = root["lights"]) {
    for (const YAML::Node& l : lights) {
      LightOverride o;
      o.id = yaml::get<std::int32_t>(src, l, "id");
      const bool known = std::any_of(spec.town_data->lights.begin(), spec.town_data->lights.end(),
                                     [&](const TrafficLight& t) { return t.id == o.id; });
      if (!known) yaml::fail(src, l["id"], "unknown light " + std::to_string(o.id));
      const YAML::Node c = l["cycle"];
      if (!c) yaml::fail(src, l, "light override needs a cycle");
      o.cycle.green = yaml::get_or<double>(src, c, "green", o.cycle.green);
      o.cycle.orange = yaml::get_or<double>(src, c, "orange", o.cycle.orange);
      o.cycle.red = yaml::get_or<double>(src, c, "red", o.cycle.red);
      o.cycle.offset = yaml::get_or<double>(src, c, "offset", 0.0);
      if (!(o.cycle.green > 0 && o.cycle.orange > 0 && o.cycle.red > 0)) {
        yaml::fail(src, c, "light cycle durations must be positive");
      }
      spec.lights.push_back(o);
    }
  }
  return spec;
}

EpisodeSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string(), path.parent_path());
}

}  // namespace affdrive
