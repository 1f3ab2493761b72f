#include "affdrive/route_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace affdrive {

void TopoGraph::add_node(std::int32_t id, Vec2 position) {
  if (!nodes_.emplace(id, position).second) {
    throw std::invalid_argument("duplicate graph node " + std::to_string(id));
  }
  out_[id];
}

void TopoGraph::add_edge(TopoEdge edge) {
  if (!contains(edge.from) || !contains(edge.to)) throw std::invalid_argument("edge with unknown endpoint");
  if (!(edge.length > 0.0)) throw std::invalid_argument("edge length must be positive");
  for (std::size_t i : out_[edge.from]) {
    if (edges_[i].command == edge.command) {
      throw std::invalid_argument("node " + std::to_string(edge.from) + " already has a '" +
                                  std::string(to_string(edge.command)) + "' edge");
    }
  }
  out_[edge.from].push_back(edges_.size());
  edges_.push_back(std::move(edge));
}

const std::vector<std::size_t>& TopoGraph::out_edges(std::int32_t id) const {
  static const std::vector<std::size_t> none;
  const auto it = out_.find(id);
  return it == out_.end() ? none : it->second;
}

Route plan_route(const TopoGraph& graph, std::int32_t start, std::int32_t goal) {
  if (!graph.contains(start) || !graph.contains(goal)) throw std::invalid_argument("route endpoint not in graph");
  Route route;
  if (start == goal) return route;

  const Vec2 target = graph.position(goal);
  auto heuristic = [&](std::int32_t n) { return distance(graph.position(n), target); };

  std::map<std::int32_t, double> cost;
  std::map<std::int32_t, std::size_t> via;  // edge index reaching the node
  std::map<std::int32_t, bool> closed;
  using Entry = std::pair<double, std::int32_t>;  // (f, node), smallest first
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  cost[start] = 0.0;
  open.push({heuristic(start), start});

  while (!open.empty()) {
    const auto [f, node] = open.top();
    open.pop();
    if (closed[node]) continue;
    closed[node] = true;
    if (node == goal) break;
    const double g = cost[node];
    for (std::size_t ei : graph.out_edges(node)) {
      const TopoEdge& e = graph.edges()[ei];
      if (closed[e.to]) continue;
      const double candidate = g + e.length;
      const auto it = cost.find(e.to);
      if (it == cost.end() || candidate < it->second) {
        cost[e.to] = candidate;
        via[e.to] = ei;
        open.push({candidate + heuristic(e.to), e.to});
      }
    }
  }
  if (!closed[goal]) {
    throw NoRouteError("no route from node " + std::to_string(start) + " to node " + std::to_string(goal));
  }
  for (std::int32_t n = goal; n != start;) {
    const std::size_t ei = via.at(n);
    const TopoEdge& e = graph.edges()[ei];
    route.steps.push_back({e.from, e.command, ei});
    n = e.from;
  }
  std::reverse(route.steps.begin(), route.steps.end());
  route.length = cost.at(goal);
  return route;
}

TopoGraph build_topo_graph(const RoadNetwork& network) {
  TopoGraph graph;
  for (const Lane& l : network.lanes()) {
    if (l.kind == LaneKind::road) graph.add_node(l.id.value, l.centerline.back());
  }
  for (const Lane& l : network.lanes()) {
    if (l.kind != LaneKind::road) continue;
    for (const auto& [cmd, succ] : l.successors) {
      // Follow connectors until the next road lane.
      std::vector<LaneId> chain{succ};
      double length = network.lane(succ).centerline.length();
      LaneId cur = succ;
      while (network.lane(cur).kind == LaneKind::connector) {
        const auto& next = network.lane(cur).successors;
        if (next.empty()) break;
        cur = next.begin()->second;
        chain.push_back(cur);
        length += network.lane(cur).centerline.length();
      }
      if (network.lane(cur).kind != LaneKind::road) continue;
      graph.add_edge({l.id.value, cur.value, length, cmd, std::move(chain)});
    }
  }
  return graph;
}

Route plan_lane_route(const TopoGraph& graph, const RoadNetwork& network, LaneId start_lane, double start_s,
                      LaneId goal_lane, double goal_s) {
  const double start_rest = network.lane(start_lane).centerline.length() - start_s;
  const double goal_rest = network.lane(goal_lane).centerline.length() - goal_s;
  if (start_lane == goal_lane && goal_s >= start_s) {
    Route r;
    r.length = goal_s - start_s;
    return r;
  }
  Route best;
  if (start_lane == goal_lane) {
    // Goal behind the start on the same lane: leave and come back around.
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t ei : graph.out_edges(start_lane.value)) {
      const TopoEdge& e = graph.edges()[ei];
      Route tail;
      try {
        tail = plan_route(graph, e.to, goal_lane.value);
      } catch (const NoRouteError&) {
        continue;
      }
      const double total = e.length + tail.length;
      if (total < best_cost) {
        best_cost = total;
        best.steps = {{e.from, e.command, ei}};
        best.steps.insert(best.steps.end(), tail.steps.begin(), tail.steps.end());
        best.length = total;
      }
    }
    if (best.steps.empty()) throw NoRouteError("no route back to lane " + std::to_string(goal_lane.value));
  } else {
    best = plan_route(graph, start_lane.value, goal_lane.value);
  }
  best.length = start_rest + best.length - goal_rest;
  return best;
}

RouteCursor::RouteCursor(const TopoGraph& graph, const RoadNetwork& network, Route route,
                         double activation_distance)
    : route_(std::move(route)), activation_(activation_distance) {
  for (const RouteStep& step : route_.steps) {
    const TopoEdge& e = graph.edges().at(step.edge);
    const Lane& exit = network.lane(e.lanes.empty() ? LaneId{e.to} : e.lanes.back());
    waypoints_.push_back({graph.position(step.node), exit.centerline, exit.width});
  }
}

std::optional<Command> RouteCursor::next_command(const Pose2D& front_axle) {
  const Vec2 p = front_axle.position();
  while (next_ < waypoints_.size()) {
    const Waypoint& w = waypoints_[next_];
    const PolylineProjection proj = w.exit.project(p);
    if (proj.arc_length > 0.0 && std::abs(proj.offset) <= w.exit_width) {
      ++next_;
      continue;
    }
    break;
  }
  if (complete()) return std::nullopt;
  if (distance(p, waypoints_[next_].position) <= activation_) return route_.steps[next_].command;
  return Command::straight;
}

}  // namespace affdrive
