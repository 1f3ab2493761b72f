#pragma once

// A* over a topological graph of branch points, and the cursor that turns a
// planned route into the directional command stream.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "affdrive/geometry.hpp"
#include "affdrive/town.hpp"

namespace affdrive {

struct TopoEdge {
  std::int32_t from = 0;
  std::int32_t to = 0;
  double length = 0.0;
  Command command = Command::straight;  // selects this edge at `from`
  std::vector<LaneId> lanes;           // lanes traversed, empty for abstract graphs
};

/// Directed graph with planar node positions. Edge lengths must be at least
/// the straight-line distance between their endpoints for A* to be exact.
class TopoGraph {
 public:
  void add_node(std::int32_t id, Vec2 position);
  /// Throws on unknown endpoints, non-positive length or a reused label.
  void add_edge(TopoEdge edge);

  bool contains(std::int32_t id) const { return nodes_.count(id) != 0; }
  Vec2 position(std::int32_t id) const { return nodes_.at(id); }
  const std::map<std::int32_t, Vec2>& nodes() const { return nodes_; }
  const std::vector<TopoEdge>& edges() const { return edges_; }
  /// Indices into edges(), in insertion order.
  const std::vector<std::size_t>& out_edges(std::int32_t id) const;

 private:
  std::map<std::int32_t, Vec2> nodes_;
  std::vector<TopoEdge> edges_;
  std::map<std::int32_t, std::vector<std::size_t>> out_;
};

class NoRouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RouteStep {
  std::int32_t node = 0;
  Command command = Command::straight;
  std::size_t edge = 0;
};

struct Route {
  std::vector<RouteStep> steps;
  double length = 0.0;
};

/// Minimum-length route. Euclidean heuristic; among equal priorities the
/// smallest node id is expanded first. Throws NoRouteError when unreachable.
Route plan_route(const TopoGraph& graph, std::int32_t start, std::int32_t goal);

/// Graph over a road network: one node per road lane, placed at the lane's
/// end; an edge per connector, labelled with the command selecting it and
/// weighted by connector plus destination lane length.
TopoGraph build_topo_graph(const RoadNetwork& network);

/// Route between two points on road lanes, given as (lane, arc length).
/// `length` is the driving distance between them along the route.
Route plan_lane_route(const TopoGraph& graph, const RoadNetwork& network, LaneId start_lane,
                      double start_s, LaneId goal_lane, double goal_s);

inline constexpr double kDefaultActivationDistance = 30.0;

/// Walks a route as the ego drives: the command of the next unvisited branch
/// point is issued within the activation distance, straight otherwise.
class RouteCursor {
 public:
  RouteCursor(const TopoGraph& graph, const RoadNetwork& network, Route route,
              double activation_distance = kDefaultActivationDistance);

  /// Command for this step; updates visited branch points first. Empty once
  /// every branch point has been passed (route complete).
  std::optional<Command> next_command(const Pose2D& front_axle);
  /// All branch points visited.
  bool complete() const { return next_ >= route_.steps.size(); }
  std::size_t visited() const { return next_; }
  const Route& route() const { return route_; }

 private:
  struct Waypoint {
    Vec2 position;
    Polyline exit;  // first lane after the branch point
    double exit_width = 0.0;
  };

  Route route_;
  std::vector<Waypoint> waypoints_;
  double activation_;
  std::size_t next_ = 0;
};

}  // namespace affdrive
