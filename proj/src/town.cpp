#include "affdrive/town.hpp"

#include <cmath>
#include <limits>

namespace affdrive {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::straight: return "straight";
    case Command::left: return "left";
    case Command::right: return "right";
  }
  return "straight";
}

std::optional<Command> parse_command(std::string_view s) {
  for (Command c : kAllCommands) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(LightState s) {
  switch (s) {
    case LightState::green: return "green";
    case LightState::orange: return "orange";
    case LightState::red: return "red";
  }
  return "green";
}

std::string_view to_string(ActorKind k) {
  switch (k) {
    case ActorKind::vehicle: return "vehicle";
    case ActorKind::pedestrian: return "pedestrian";
    case ActorKind::static_object: return "static";
  }
  return "static";
}

bool valid_speed_limit(int kmh) { return kmh == 30 || kmh == 60 || kmh == 90; }

PolylineProjection nearest_centerline_point(const Lane& lane, Vec2 p) {
  return lane.centerline.project(p);
}

LightState LightCycle::state_at(double time) const {
  const double period_s = period();
  double phase = std::fmod(time + offset, period_s);
  if (phase < 0.0) phase += period_s;
  if (phase < green) return LightState::green;
  if (phase < green + orange) return LightState::orange;
  return LightState::red;
}

Segment TrafficLight::trigger_segment() const {
  const Vec2 pole = pose.position();
  if (trigger_length <= 0.0) return {pole, pole};
  // The light faces oncoming traffic, so upstream is along its heading.
  return {pole + trigger_length * unit_from_heading(pose.heading), pole};
}

// --- RoadNetwork -------------------------------------------------------------

RoadNetwork::RoadNetwork(std::string name, std::vector<Lane> lanes,
                         std::vector<std::vector<Vec2>> sidewalks)
    : name_(std::move(name)), lanes_(std::move(lanes)), sidewalks_(std::move(sidewalks)) {
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    if (!index_.emplace(lanes_[i].id, i).second) {
      throw std::invalid_argument("duplicate lane id " + std::to_string(lanes_[i].id.value));
    }
  }
  for (const Lane& l : lanes_) {
    for (const auto& [cmd, succ] : l.successors) {
      if (!contains(succ)) {
        throw std::invalid_argument("lane " + std::to_string(l.id.value) +
                                    " has unknown successor " + std::to_string(succ.value));
      }
      if (lane(succ).kind == LaneKind::connector) {
        predecessor_[succ] = l.id;
        branches_[l.id][cmd] = succ;
      }
    }
    if (l.opposite && !contains(*l.opposite)) {
      throw std::invalid_argument("lane " + std::to_string(l.id.value) + " has unknown opposite lane");
    }
  }
}

const Lane& RoadNetwork::lane(LaneId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown lane " + std::to_string(id.value));
  return lanes_[it->second];
}

const std::map<Command, LaneId>& RoadNetwork::branch_of(LaneId id) const {
  static const std::map<Command, LaneId> empty;
  const auto pred = predecessor_.find(id);
  if (pred == predecessor_.end()) return empty;
  return branches_.at(pred->second);
}

std::optional<LaneId> RoadNetwork::predecessor_of(LaneId connector) const {
  const auto it = predecessor_.find(connector);
  if (it == predecessor_.end()) return std::nullopt;
  return it->second;
}

std::optional<LaneId> RoadNetwork::nearest_lane(Vec2 p, double heading, double max_distance,
                                                double max_heading_error) const {
  std::optional<LaneId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Lane& l : lanes_) {
    const PolylineProjection proj = l.centerline.project(p);
    const double dist = std::abs(proj.offset);
    if (dist > max_distance) continue;
    if (std::abs(wrap_angle(proj.heading - heading)) > max_heading_error) continue;
    if (dist < best_dist) {
      best_dist = dist;
      best = l.id;
    }
  }
  return best;
}

bool RoadNetwork::on_sidewalk(Vec2 p) const {
  for (const auto& poly : sidewalks_) {
    if (point_in_polygon(poly, p)) return true;
  }
  return false;
}

bool RoadNetwork::in_opposing_lane(Vec2 p, double heading) const {
  const Vec2 dir = unit_from_heading(heading);
  for (const Lane& l : lanes_) {
    if (l.kind != LaneKind::road) continue;
    const PolylineProjection proj = l.centerline.project(p);
    if (proj.arc_length <= 0.0 || proj.arc_length >= l.centerline.length()) continue;
    if (std::abs(proj.offset) > 0.5 * l.width) continue;
    if (dot(dir, unit_from_heading(proj.heading)) < 0.0) return true;
  }
  return false;
}

// --- Ego ---------------------------------------------------------------------

OrientedBox Ego::box() const {
  const Pose2D c = center();
  return {c.position(), c.heading, geometry.half_extents()};
}

Actor Ego::as_actor() const {
  Actor a;
  a.id = -1;
  a.kind = ActorKind::vehicle;
  a.pose = center();
  a.speed = speed;
  a.half_extents = geometry.half_extents();
  return a;
}

Ego ego_from_front_axle(const Pose2D& front_axle, double speed, const VehicleGeometry& geometry) {
  Ego e;
  e.geometry = geometry;
  e.rear_axle = front_axle.advanced(-geometry.wheelbase);
  e.speed = speed;
  return e;
}

WorldState make_world(const Town& town, const Ego& ego) {
  WorldState w;
  w.ego = ego;
  w.actors = town.actors;
  w.lights = town.lights;
  w.signs = town.signs;
  w.network = town.network;
  for (TrafficLight& l : w.lights) l.state = l.cycle.state_at(0.0);
  return w;
}

}  // namespace affdrive
