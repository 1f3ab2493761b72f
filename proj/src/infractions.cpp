#include "affdrive/infractions.hpp"

namespace affdrive {

std::string_view to_string(InfractionKind k) {
  switch (k) {
    case InfractionKind::opposite_lane: return "opposite_lane";
    case InfractionKind::sidewalk: return "sidewalk";
    case InfractionKind::collision_static: return "collision_static";
    case InfractionKind::collision_car: return "collision_car";
    case InfractionKind::collision_pedestrian: return "collision_pedestrian";
    case InfractionKind::red_light_violation: return "red_light_violation";
  }
  return "opposite_lane";
}

std::optional<InfractionKind> parse_infraction_kind(std::string_view s) {
  for (InfractionKind k : kAllInfractionKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::array<bool, 6> infraction_conditions(const WorldState& prev, const WorldState& now) {
  std::array<bool, 6> active{};
  const RoadNetwork& net = *now.network;
  const Pose2D center = now.ego.center();
  active[static_cast<int>(InfractionKind::opposite_lane)] =
      net.in_opposing_lane(center.position(), center.heading);
  active[static_cast<int>(InfractionKind::sidewalk)] = net.on_sidewalk(center.position());

  const OrientedBox ego_box = now.ego.box();
  for (const Actor& a : now.actors) {
    if (!a.active || !boxes_overlap(ego_box, a.box())) continue;
    switch (a.kind) {
      case ActorKind::static_object:
        active[static_cast<int>(InfractionKind::collision_static)] = true;
        break;
      case ActorKind::vehicle:
        active[static_cast<int>(InfractionKind::collision_car)] = true;
        break;
      case ActorKind::pedestrian:
        active[static_cast<int>(InfractionKind::collision_pedestrian)] = true;
        break;
    }
  }

  const Segment travelled{prev.ego.front_axle().position(), now.ego.front_axle().position()};
  const Vec2 forward = now.ego.rear_axle.forward();
  for (std::size_t i = 0; i < prev.lights.size(); ++i) {
    const TrafficLight& l = prev.lights[i];
    if (l.state != LightState::red) continue;
    if (dot(unit_from_heading(l.pose.heading), forward) > -0.5) continue;
    if (travelled.a == travelled.b) continue;
    if (segments_intersect(travelled, l.stop_line)) {
      active[static_cast<int>(InfractionKind::red_light_violation)] = true;
    }
  }
  return active;
}

void InfractionDetector::observe(const WorldState& prev, const WorldState& now,
                                 std::vector<InfractionEvent>& events) {
  const std::array<bool, 6> active = infraction_conditions(prev, now);
  for (InfractionKind kind : kAllInfractionKinds) {
    Channel& ch = channels_[static_cast<int>(kind)];
    if (active[static_cast<int>(kind)]) {
      if (ch.armed) {
        events.push_back({kind, now.time, now.ego.center().position()});
        ch.armed = false;
      }
      ch.last_active = now.time;
    } else if (!ch.armed && now.time - ch.last_active >= debounce_) {
      ch.armed = true;
    }
  }
}

}  // namespace affdrive
