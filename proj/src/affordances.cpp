#include "affdrive/affordances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace affdrive {

std::array<Vec2, 4> ObservationArea::vertices() const {
  return {Vec2{x_min, y_max}, Vec2{x_min, y_min}, Vec2{x_max, y_max}, Vec2{x_max, y_min}};
}

OrientedBox ObservationArea::to_world(const Pose2D& front_axle) const {
  const Vec2 mid{0.5 * (x_min + x_max), 0.5 * (y_min + y_max)};
  return {local_to_global(front_axle, mid), front_axle.heading,
          {0.5 * (x_max - x_min), 0.5 * (y_max - y_min)}};
}

bool point_in_area(const ObservationArea& area, Vec2 local) {
  return local.x >= area.x_min && local.x <= area.x_max && local.y >= area.y_min &&
         local.y <= area.y_max;
}

std::optional<std::pair<LaneId, bool>> successor_for(const Lane& lane, Command command) {
  if (lane.successors.empty()) return std::nullopt;
  if (const auto it = lane.successors.find(command); it != lane.successors.end()) {
    return std::pair{it->second, false};
  }
  if (lane.successors.size() == 1) return std::pair{lane.successors.begin()->second, true};
  for (Command c : {Command::straight, Command::right, Command::left}) {
    if (const auto it = lane.successors.find(c); it != lane.successors.end()) {
      return std::pair{it->second, true};
    }
  }
  return std::nullopt;
}

LaneId locate_lane(const RoadNetwork& network, const Pose2D& front_axle) {
  const auto lane = network.nearest_lane(front_axle.position(), front_axle.heading, kOffRoadDistance);
  if (!lane) {
    throw OffRoadError("no lane within " + std::to_string(kOffRoadDistance) + " m of (" +
                       std::to_string(front_axle.x) + ", " + std::to_string(front_axle.y) + ")");
  }
  return *lane;
}

LaneId track_lane(const RoadNetwork& network, const Pose2D& front_axle, std::optional<LaneId> current,
                  Command command) {
  if (!current || !network.contains(*current)) return locate_lane(network, front_axle);
  LaneId id = *current;
  const Vec2 p = front_axle.position();
  // A connector is short, so a couple of hops covers any single step.
  for (int hop = 0; hop < 4; ++hop) {
    const Lane& lane = network.lane(id);
    const PolylineProjection proj = lane.centerline.project(p);
    if (std::abs(proj.offset) > kOffRoadDistance) return locate_lane(network, front_axle);
    if (proj.arc_length < lane.centerline.length()) return id;
    const auto next = successor_for(lane, command);
    if (!next) return id;
    const PolylineProjection next_proj = network.lane(next->first).centerline.project(p);
    if (next_proj.arc_length <= 0.0) return id;
    id = next->first;
  }
  return id;
}

namespace {

void append_points(std::vector<Vec2>& out, const Polyline& line) {
  for (const Vec2& p : line.points()) {
    if (!out.empty() && out.back() == p) continue;
    out.push_back(p);
  }
}

}  // namespace

ReferencePath select_reference_path(const RoadNetwork& network, LaneId current, Command command) {
  ReferencePath ref;
  const Lane& lane = network.lane(current);
  if (lane.kind == LaneKind::connector) {
    // Inside a branch region the command picks among sibling connectors.
    LaneId chosen = current;
    const auto& branch = network.branch_of(current);
    if (const auto pred = network.predecessor_of(current)) {
      const auto succ = successor_for(network.lane(*pred), command);
      if (succ) {
        chosen = succ->first;
        ref.substituted = succ->second;
      }
      ref.lanes.push_back(*pred);
    } else if (const auto it = branch.find(command); it != branch.end()) {
      chosen = it->second;
    }
    ref.lanes.push_back(chosen);
    if (const auto next = successor_for(network.lane(chosen), Command::straight)) {
      ref.lanes.push_back(next->first);
    }
  } else {
    ref.lanes.push_back(current);
    if (const auto succ = successor_for(lane, command)) {
      ref.substituted = succ->second;
      ref.lanes.push_back(succ->first);
      const Lane& conn = network.lane(succ->first);
      if (conn.kind == LaneKind::connector) {
        if (const auto next = successor_for(conn, Command::straight)) ref.lanes.push_back(next->first);
      }
    }
  }
  std::vector<Vec2> pts;
  for (LaneId id : ref.lanes) append_points(pts, network.lane(id).centerline);
  ref.path = Polyline(std::move(pts));
  return ref;
}

Affordances compute_affordances(const WorldState& world, Command command) {
  const RoadNetwork& net = *world.network;
  const Pose2D front = world.ego.front_axle();
  Affordances aff;

  LaneId lane = world.ego_lane && net.contains(*world.ego_lane) ? *world.ego_lane
                                                                 : locate_lane(net, front);
  ReferencePath ref = select_reference_path(net, lane, command);
  PolylineProjection proj = ref.path.project(front.position());
  if (std::abs(proj.offset) > kOffRoadDistance) {
    lane = locate_lane(net, front);
    ref = select_reference_path(net, lane, command);
    proj = ref.path.project(front.position());
  }
  aff.center_distance = std::clamp(proj.offset, -kMaxCenterDistance, kMaxCenterDistance);
  aff.relative_angle = wrap_angle(front.heading - proj.heading);

  const OrientedBox ego_box = world.ego.box();
  const OrientedBox a1 = kAreaA1.to_world(front);
  const OrientedBox a2 = kAreaA2.to_world(front);
  const OrientedBox a3 = kAreaA3.to_world(front);

  for (const Actor& a : world.actors) {
    if (!a.active || a.kind == ActorKind::static_object) continue;
    const OrientedBox box = a.box();
    if (boxes_overlap(box, a2)) aff.hazard_stop = true;
    if (a.kind == ActorKind::vehicle && boxes_overlap(box, a3)) {
      aff.vehicle_distance = std::min(aff.vehicle_distance, box_distance(ego_box, box));
    }
  }
  aff.vehicle_distance = std::clamp(aff.vehicle_distance, 0.0, kMaxVehicleDistance);

  double nearest_sign = std::numeric_limits<double>::infinity();
  for (const SpeedSign& s : world.signs) {
    if (dot(unit_from_heading(s.pose.heading), front.forward()) > -0.5) continue;
    const Vec2 local = global_to_local(front, s.pose.position());
    if (point_in_area(kAreaA1, local) && local.x < nearest_sign) {
      nearest_sign = local.x;
      aff.speed_sign = s.limit_kmh;
    }
  }

  for (const TrafficLight& l : world.lights) {
    if (l.state == LightState::green) continue;
    // Only lights facing the ego regulate it.
    if (dot(unit_from_heading(l.pose.heading), front.forward()) > -0.5) continue;
    const bool seen = l.trigger_length > 0.0
                          ? segment_intersects_box(l.trigger_segment(), a1)
                          : point_in_area(kAreaA1, global_to_local(front, l.pose.position()));
    if (seen) {
      aff.red_light = true;
      break;
    }
  }
  return aff;
}

}  // namespace affdrive
