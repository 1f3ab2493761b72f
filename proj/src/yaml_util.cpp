#include "yaml_util.hpp"

namespace affdrive::yaml {

Vec2 point(const std::string& source, const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 2) fail(source, n, "expected [x, y]");
  try {
    return {n[0].as<double>(), n[1].as<double>()};
  } catch (const YAML::Exception&) {
    fail(source, n, "expected numeric [x, y]");
  }
}

std::vector<Vec2> points(const std::string& source, const YAML::Node& n) {
  if (!n.IsSequence()) fail(source, n, "expected a list of points");
  std::vector<Vec2> out;
  out.reserve(n.size());
  for (const YAML::Node& p : n) out.push_back(point(source, p));
  return out;
}

Pose2D pose(const std::string& source, const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 3) fail(source, n, "expected [x, y, heading]");
  try {
    return make_pose(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
  } catch (const YAML::Exception&) {
    fail(source, n, "expected numeric [x, y, heading]");
  }
}

namespace {

ActorKind actor_kind(const std::string& source, const YAML::Node& n) {
  const auto s = n.as<std::string>();
  if (s == "vehicle") return ActorKind::vehicle;
  if (s == "pedestrian") return ActorKind::pedestrian;
  if (s == "static") return ActorKind::static_object;
  fail(source, n, "unknown actor kind '" + s + "'");
}

Polyline polyline(const std::string& source, const YAML::Node& n) {
  try {
    return Polyline(points(source, n));
  } catch (const std::invalid_argument& e) {
    fail(source, n, e.what());
  }
}

}  // namespace

Actor actor(const std::string& source, const YAML::Node& n) {
  Actor a;
  a.id = get<std::int32_t>(source, n, "id");
  a.kind = actor_kind(source, n["kind"] ? n["kind"] : n);
  if (a.kind == ActorKind::pedestrian) a.half_extents = {0.3, 0.3};
  if (n["half_extents"]) a.half_extents = point(source, n["half_extents"]);
  if (!(a.half_extents.x > 0.0 && a.half_extents.y > 0.0)) {
    fail(source, n, "half_extents must be positive");
  }
  a.speed = get_or<double>(source, n, "speed", 0.0);
  if (a.speed < 0.0) fail(source, n, "speed must be non-negative");
  if (const YAML::Node s = n["script"]) {
    ActorScript script;
    script.path = polyline(source, s["waypoints"] ? s["waypoints"] : s);
    script.speed = get<double>(source, s, "speed");
    if (!(script.speed >= 0.0)) fail(source, s, "script speed must be non-negative");
    script.start_time = get_or<double>(source, s, "start_time", 0.0);
    const auto end = get_or<std::string>(source, s, "end", "hold");
    if (end == "hold") {
      script.at_end = ScriptEnd::hold;
    } else if (end == "vanish") {
      script.at_end = ScriptEnd::vanish;
    } else {
      fail(source, s["end"], "script end must be hold or vanish");
    }
    const Vec2 p0 = script.path.front();
    a.pose = make_pose(p0.x, p0.y, script.path.segment_heading(0));
    if (n["pose"]) a.pose = pose(source, n["pose"]);
    a.script = std::move(script);
  } else {
    a.pose = pose(source, n["pose"] ? n["pose"] : n);
  }
  return a;
}

void emit_point(YAML::Emitter& out, Vec2 p) {
  out << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << YAML::EndSeq;
}

void emit_points(YAML::Emitter& out, const std::vector<Vec2>& pts) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const Vec2& p : pts) out << YAML::BeginSeq << num(p.x) << num(p.y) << YAML::EndSeq;
  out << YAML::EndSeq;
}

void emit_pose(YAML::Emitter& out, const Pose2D& p) {
  out << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << num(p.heading) << YAML::EndSeq;
}

void emit_actor(YAML::Emitter& out, const Actor& a) {
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << a.id;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(a.kind));
  out << YAML::Key << "pose" << YAML::Value;
  emit_pose(out, a.pose);
  out << YAML::Key << "half_extents" << YAML::Value;
  emit_point(out, a.half_extents);
  if (a.speed != 0.0) out << YAML::Key << "speed" << YAML::Value << num(a.speed);
  if (a.script) {
    out << YAML::Key << "script" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "waypoints" << YAML::Value;
    emit_points(out, a.script->path.points());
    out << YAML::Key << "speed" << YAML::Value << num(a.script->speed);
    out << YAML::Key << "start_time" << YAML::Value << num(a.script->start_time);
    out << YAML::Key << "end" << YAML::Value
        << (a.script->at_end == ScriptEnd::vanish ? "vanish" : "hold");
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
}

}  // namespace affdrive::yaml
