#include "affdrive/town_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "affdrive/town_builder.hpp"
#include "yaml_util.hpp"

namespace affdrive {

namespace {

std::string format_error(const std::string& source, int line, const std::string& what) {
  if (line > 0) return source + ":" + std::to_string(line) + ": " + what;
  return source + ": " + what;
}

LightCycle parse_cycle(const std::string& src, const YAML::Node& n) {
  LightCycle c;
  if (!n) return c;
  c.green = yaml::get_or<double>(src, n, "green", c.green);
  c.orange = yaml::get_or<double>(src, n, "orange", c.orange);
  c.red = yaml::get_or<double>(src, n, "red", c.red);
  c.offset = yaml::get_or<double>(src, n, "offset", 0.0);
  if (!(c.green > 0.0 && c.orange > 0.0 && c.red > 0.0)) {
    yaml::fail(src, n, "light cycle durations must be positive");
  }
  return c;
}

}  // namespace

LoadError::LoadError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(format_error(source, line, what)), line_(line) {}

Town parse_town(const std::string& text, const std::string& src) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw LoadError(src, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw LoadError(src, 0, "town file must be a mapping");

  const auto name = yaml::get_or<std::string>(src, root, "town", "unnamed");
  const YAML::Node lanes_node = root["lanes"];
  if (!lanes_node || !lanes_node.IsSequence() || lanes_node.size() == 0) {
    yaml::fail(src, root, "town needs a non-empty 'lanes' list");
  }

  // First pass: ids, so references can be checked with the referring line.
  std::set<LaneId> ids;
  for (const YAML::Node& ln : lanes_node) {
    const LaneId id{yaml::get<std::int32_t>(src, ln, "id")};
    if (!ids.insert(id).second) yaml::fail(src, ln["id"], "duplicate lane id " + std::to_string(id.value));
  }
  auto check_ref = [&](const YAML::Node& n) {
    const LaneId ref{n.as<std::int32_t>()};
    if (!ids.count(ref)) yaml::fail(src, n, "reference to unknown lane " + std::to_string(ref.value));
    return ref;
  };

  std::vector<Lane> lanes;
  for (const YAML::Node& ln : lanes_node) {
    Lane lane;
    lane.id = LaneId{ln["id"].as<std::int32_t>()};
    const auto kind = yaml::get_or<std::string>(src, ln, "kind", "road");
    if (kind == "road") {
      lane.kind = LaneKind::road;
    } else if (kind == "connector") {
      lane.kind = LaneKind::connector;
    } else {
      yaml::fail(src, ln["kind"], "lane kind must be road or connector");
    }
    const YAML::Node cl = ln["centerline"];
    if (!cl) yaml::fail(src, ln, "lane without centerline");
    try {
      lane.centerline = Polyline(yaml::points(src, cl));
    } catch (const std::invalid_argument& e) {
      yaml::fail(src, cl, e.what());
    }
    lane.width = yaml::get_or<double>(src, ln, "width", 4.0);
    if (!(lane.width > 0.0)) yaml::fail(src, ln["width"], "lane width must be positive");
    lane.speed_limit_kmh = yaml::get_or<int>(src, ln, "speed_limit", 30);
    if (!valid_speed_limit(lane.speed_limit_kmh)) {
      yaml::fail(src, ln["speed_limit"], "speed limit must be 30, 60 or 90");
    }
    if (const YAML::Node succ = ln["successors"]) {
      if (!succ.IsMap()) yaml::fail(src, succ, "successors must map commands to lane ids");
      for (const auto& kv : succ) {
        const auto cmd = parse_command(kv.first.as<std::string>());
        if (!cmd) yaml::fail(src, kv.first, "unknown command '" + kv.first.as<std::string>() + "'");
        lane.successors[*cmd] = check_ref(kv.second);
      }
    }
    if (const YAML::Node opp = ln["opposite"]) lane.opposite = check_ref(opp);
    lanes.push_back(std::move(lane));
  }

  std::vector<std::vector<Vec2>> sidewalks;
  if (const YAML::Node sw = root["sidewalks"]) {
    for (const YAML::Node& poly : sw) {
      auto pts = yaml::points(src, poly);
      if (pts.size() < 3) yaml::fail(src, poly, "sidewalk polygon needs at least 3 points");
      sidewalks.push_back(std::move(pts));
    }
  }

  Town town;
  try {
    town.network = std::make_shared<RoadNetwork>(name, std::move(lanes), std::move(sidewalks));
  } catch (const std::invalid_argument& e) {
    throw LoadError(src, 0, e.what());
  }

  if (const YAML::Node lights = root["lights"]) {
    for (const YAML::Node& ln : lights) {
      TrafficLight light;
      light.id = yaml::get<std::int32_t>(src, ln, "id");
      light.pose = yaml::pose(src, ln["pose"] ? ln["pose"] : ln);
      light.cycle = parse_cycle(src, ln["cycle"]);
      const YAML::Node sl = ln["stop_line"];
      if (!sl || !sl.IsSequence() || sl.size() != 2) yaml::fail(src, ln, "light needs a two-point stop_line");
      light.stop_line = {yaml::point(src, sl[0]), yaml::point(src, sl[1])};
      light.trigger_length = yaml::get_or<double>(src, ln, "trigger_length", 0.0);
      if (light.trigger_length < 0.0) yaml::fail(src, ln["trigger_length"], "trigger_length must be >= 0");
      if (const YAML::Node lane = ln["lane"]) light.lane = check_ref(lane);
      light.state = light.cycle.state_at(0.0);
      town.lights.push_back(light);
    }
  }
  if (const YAML::Node signs = root["signs"]) {
    for (const YAML::Node& sn : signs) {
      SpeedSign s;
      s.pose = yaml::pose(src, sn["pose"] ? sn["pose"] : sn);
      s.limit_kmh = yaml::get<int>(src, sn, "limit");
      if (!valid_speed_limit(s.limit_kmh)) yaml::fail(src, sn["limit"], "speed limit must be 30, 60 or 90");
      town.signs.push_back(s);
    }
  }
  if (const YAML::Node actors = root["actors"]) {
    for (const YAML::Node& an : actors) town.actors.push_back(yaml::actor(src, an));
  }
  return town;
}

Town load_town_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open town file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_town(ss.str(), path.string());
}

std::string dump_town(const Town& town) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "town" << YAML::Value << town.network->name();

  out << YAML::Key << "lanes" << YAML::Value << YAML::BeginSeq;
  for (const Lane& l : town.network->lanes()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << l.id.value;
    out << YAML::Key << "kind" << YAML::Value << (l.kind == LaneKind::road ? "road" : "connector");
    out << YAML::Key << "width" << YAML::Value << yaml::num(l.width);
    out << YAML::Key << "speed_limit" << YAML::Value << l.speed_limit_kmh;
    if (!l.successors.empty()) {
      out << YAML::Key << "successors" << YAML::Value << YAML::Flow << YAML::BeginMap;
      for (const auto& [cmd, id] : l.successors) {
        out << YAML::Key << std::string(to_string(cmd)) << YAML::Value << id.value;
      }
      out << YAML::EndMap;
    }
    if (l.opposite) out << YAML::Key << "opposite" << YAML::Value << l.opposite->value;
    out << YAML::Key << "centerline" << YAML::Value;
    yaml::emit_points(out, l.centerline.points());
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "sidewalks" << YAML::Value << YAML::BeginSeq;
  for (const auto& poly : town.network->sidewalks()) yaml::emit_points(out, poly);
  out << YAML::EndSeq;

  out << YAML::Key << "lights" << YAML::Value << YAML::BeginSeq;
  for (const TrafficLight& l : town.lights) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << l.id;
    out << YAML::Key << "pose" << YAML::Value;
    yaml::emit_pose(out, l.pose);
    out << YAML::Key << "cycle" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "green" << YAML::Value << yaml::num(l.cycle.green);
    out << YAML::Key << "orange" << YAML::Value << yaml::num(l.cycle.orange);
    out << YAML::Key << "red" << YAML::Value << yaml::num(l.cycle.red);
    out << YAML::Key << "offset" << YAML::Value << yaml::num(l.cycle.offset);
    out << YAML::EndMap;
    out << YAML::Key << "stop_line" << YAML::Value;
    yaml::emit_points(out, {l.stop_line.a, l.stop_line.b});
    out << YAML::Key << "trigger_length" << YAML::Value << yaml::num(l.trigger_length);
    if (l.lane) out << YAML::Key << "lane" << YAML::Value << l.lane->value;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "signs" << YAML::Value << YAML::BeginSeq;
  for (const SpeedSign& s : town.signs) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "pose" << YAML::Value;
    yaml::emit_pose(out, s.pose);
    out << YAML::Key << "limit" << YAML::Value << s.limit_kmh;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "actors" << YAML::Value << YAML::BeginSeq;
  for (const Actor& a : town.actors) yaml::emit_actor(out, a);
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Town resolve_town(const std::string& name_or_path) {
  if (is_builtin_town(name_or_path)) return builtin_town(name_or_path);
  return load_town_file(name_or_path);
}

}  // namespace affdrive
