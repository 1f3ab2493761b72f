#include "affdrive/town_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace affdrive {

namespace {

using Node = std::pair<int, int>;

struct RoadLaneInfo {
  LaneId id;
  Node from;
  Node to;
  Vec2 dir;  // unit direction of travel
  int limit;
};

Vec2 right_of(Vec2 u) { return {u.y, -u.x}; }
Vec2 left_of(Vec2 u) { return {-u.y, u.x}; }

std::vector<Vec2> arc_points(Vec2 start, Vec2 end, Vec2 center, bool ccw, double spacing) {
  const double radius = distance(center, start);
  const double a0 = std::atan2(start.y - center.y, start.x - center.x);
  const double sweep = kPi / 2.0 * (ccw ? 1.0 : -1.0);
  const int n = std::max(2, static_cast<int>(std::ceil(radius * kPi / 2.0 / spacing)));
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  pts.push_back(start);
  for (int k = 1; k < n; ++k) {
    const double a = a0 + sweep * static_cast<double>(k) / n;
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  pts.push_back(end);
  return pts;
}

bool same_edge(const GridTownParams::GridEdge& e, Node a, Node b) {
  return (e.first == a && e.second == b) || (e.first == b && e.second == a);
}

}  // namespace

Town build_grid_town(const GridTownParams& p) {
  const int nx = static_cast<int>(p.xs.size());
  const int ny = static_cast<int>(p.ys.size());
  if (nx < 2 || ny < 1) throw std::invalid_argument("grid town needs at least two columns");
  const double half_lane = 0.5 * p.lane_width;
  const double h = p.box_half_size;

  auto pos = [&](Node n) { return Vec2{p.xs[n.first], p.ys[n.second]}; };

  // Undirected roads between adjacent nodes.
  std::vector<std::pair<Node, Node>> roads;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Node a{i, j};
      for (const Node& b : {Node{i + 1, j}, Node{i, j + 1}}) {
        if (b.first >= nx || b.second >= ny) continue;
        const bool removed = std::any_of(p.removed_roads.begin(), p.removed_roads.end(),
                                         [&](const auto& e) { return same_edge(e, a, b); });
        if (!removed) roads.emplace_back(a, b);
      }
    }
  }

  auto road_limit = [&](Node a, Node b) {
    for (const auto& [edge, limit] : p.road_limits) {
      if (same_edge(edge, a, b)) return limit;
    }
    return p.default_limit_kmh;
  };

  std::int32_t next_id = 0;
  std::vector<RoadLaneInfo> road_lanes;
  std::map<LaneId, Lane> lanes;
  std::vector<std::vector<Vec2>> sidewalks;

  for (const auto& [a, b] : roads) {
    const Vec2 pa = pos(a);
    const Vec2 pb = pos(b);
    const double len = distance(pa, pb);
    if (len <= 2.0 * h + 1.0) throw std::invalid_argument("grid spacing too small for intersection boxes");
    const Vec2 u = (1.0 / len) * (pb - pa);
    const int limit = road_limit(a, b);

    const LaneId forward{next_id++};
    const LaneId backward{next_id++};
    for (const auto& [id, from, to, opp] :
         {std::tuple{forward, a, b, backward}, std::tuple{backward, b, a, forward}}) {
      const Vec2 s = pos(from);
      const Vec2 e = pos(to);
      const Vec2 dir = (1.0 / len) * (e - s);
      const Vec2 off = half_lane * right_of(dir);
      Lane lane;
      lane.id = id;
      lane.kind = LaneKind::road;
      lane.centerline = Polyline({s + h * dir + off, e - h * dir + off});
      lane.width = p.lane_width;
      lane.speed_limit_kmh = limit;
      lane.opposite = opp;
      lanes.emplace(id, std::move(lane));
      road_lanes.push_back({id, from, to, dir, limit});
    }

    // Sidewalks on both sides of the road, between the intersection boxes.
    for (const Vec2 side : {right_of(u), left_of(u)}) {
      const Vec2 s0 = pa + h * u;
      const Vec2 s1 = pb - h * u;
      const Vec2 inner = p.lane_width * side;
      const Vec2 outer = (p.lane_width + p.sidewalk_width) * side;
      sidewalks.push_back({s0 + inner, s1 + inner, s1 + outer, s0 + outer});
    }
  }

  Town town;
  std::int32_t light_id = 0;
  std::int32_t actor_id = 1000;

  // Connectors and lights per intersection approach.
  for (const RoadLaneInfo& in : road_lanes) {
    const Node node = in.to;
    Lane& in_lane = lanes.at(in.id);
    const Vec2 start = in_lane.centerline.back();
    int degree = 0;
    for (const RoadLaneInfo& out : road_lanes) {
      if (out.from == node) ++degree;
    }
    for (const RoadLaneInfo& out : road_lanes) {
      if (out.from != node) continue;
      if (dot(out.dir, in.dir) < -0.5) continue;  // no U-turns
      const Vec2 end = lanes.at(out.id).centerline.front();
      Command cmd = Command::straight;
      std::vector<Vec2> pts;
      if (dot(out.dir, in.dir) > 0.5) {
        pts = {start, end};
      } else if (cross(in.dir, out.dir) > 0.0) {
        cmd = Command::left;
        const Vec2 center = start + (h + half_lane) * left_of(in.dir);
        pts = arc_points(start, end, center, true, p.arc_spacing);
      } else {
        cmd = Command::right;
        const Vec2 center = start + (h - half_lane) * right_of(in.dir);
        pts = arc_points(start, end, center, false, p.arc_spacing);
      }
      Lane conn;
      conn.id = LaneId{next_id++};
      conn.kind = LaneKind::connector;
      conn.centerline = Polyline(std::move(pts));
      conn.width = p.lane_width;
      conn.speed_limit_kmh = in.limit;
      conn.successors[Command::straight] = out.id;
      in_lane.successors[cmd] = conn.id;
      lanes.emplace(conn.id, std::move(conn));
    }

    if (degree >= 3) {
      const Vec2 right = right_of(in.dir);
      TrafficLight light;
      light.id = light_id++;
      const Vec2 pole = start + 0.5 * (p.lane_width + p.sidewalk_width) * right;
      light.pose = make_pose(pole.x, pole.y, std::atan2(-in.dir.y, -in.dir.x));
      light.cycle = p.light_cycle;
      const bool north_south = std::abs(in.dir.y) > std::abs(in.dir.x);
      const double base = std::fmod(7.0 * node.first + 13.0 * node.second, p.light_cycle.period());
      light.cycle.offset = base + (north_south ? 0.0 : p.light_cycle.green);
      light.stop_line = {start - half_lane * right, start + half_lane * right};
      light.trigger_length =
          std::min(p.light_trigger_length * in.limit / 30.0, in_lane.centerline.length());
      light.lane = in.id;
      light.state = light.cycle.state_at(0.0);
      town.lights.push_back(light);

      Actor pole_actor;
      pole_actor.id = actor_id++;
      pole_actor.kind = ActorKind::static_object;
      pole_actor.pose = light.pose;
      pole_actor.half_extents = {0.2, 0.2};
      town.actors.push_back(pole_actor);
    }
  }

  // Speed signs near the start of every road lane.
  for (const RoadLaneInfo& r : road_lanes) {
    const Lane& lane = lanes.at(r.id);
    const double s = std::min(p.sign_distance, 0.5 * lane.centerline.length());
    const Vec2 at = lane.centerline.point_at(s) + (0.5 * p.sidewalk_width + half_lane) * right_of(r.dir);
    town.signs.push_back({make_pose(at.x, at.y, std::atan2(-r.dir.y, -r.dir.x)), r.limit});
  }

  std::vector<Lane> lane_list;
  lane_list.reserve(lanes.size());
  for (auto& [id, lane] : lanes) lane_list.push_back(std::move(lane));
  town.network = std::make_shared<RoadNetwork>(p.name, std::move(lane_list), std::move(sidewalks));
  return town;
}

GridTownParams town_a_params() {
  GridTownParams p;
  p.name = "town-a";
  p.xs = {0.0, 100.0, 200.0, 300.0};
  p.ys = {0.0, 100.0, 200.0};
  // Middle avenue is a 60 zone.
  p.road_limits = {{{{0, 1}, {1, 1}}, 60}, {{{1, 1}, {2, 1}}, 60}, {{{2, 1}, {3, 1}}, 60}};
  return p;
}

GridTownParams town_b_params() {
  GridTownParams p;
  p.name = "town-b";
  p.xs = {0.0, 90.0, 210.0};
  p.ys = {0.0, 80.0, 200.0, 290.0};
  p.removed_roads = {{{1, 1}, {1, 2}}};
  p.road_limits = {{{{0, 2}, {1, 2}}, 60}};
  return p;
}

bool is_builtin_town(const std::string& name) { return name == "town-a" || name == "town-b"; }

Town builtin_town(const std::string& name) {
  if (name == "town-a") return build_grid_town(town_a_params());
  if (name == "town-b") return build_grid_town(town_b_params());
  throw std::invalid_argument("unknown built-in town '" + name + "'");
}

}  // namespace affdrive
