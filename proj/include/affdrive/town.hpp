#pragma once

// Road network, regulators and actors, plus the geometric queries the rest of
// the stack asks of them.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affdrive/geometry.hpp"

namespace affdrive {

enum class Command { straight, left, right };

inline constexpr std::array<Command, 3> kAllCommands = {Command::straight, Command::left,
                                                        Command::right};

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view s);

struct LaneId {
  std::int32_t value = -1;
  friend constexpr auto operator<=>(LaneId, LaneId) = default;
};

enum class LaneKind { road, connector };

struct Lane {
  LaneId id;
  LaneKind kind = LaneKind::road;
  Polyline centerline;
  double width = 4.0;
  int speed_limit_kmh = 30;
  std::map<Command, LaneId> successors;
  std::optional<LaneId> opposite;
};

/// Projection of a point onto a lane centerline.
PolylineProjection nearest_centerline_point(const Lane& lane, Vec2 p);

enum class LightState { green, orange, red };

std::string_view to_string(LightState s);

struct LightCycle {
  double green = 10.0;
  double orange = 3.0;
  double red = 7.0;
  double offset = 0.0;  // phase at t = 0, seconds into the cycle

  double period() const { return green + orange + red; }
  LightState state_at(double time) const;
};

struct TrafficLight {
  std::int32_t id = 0;
  Pose2D pose;  // pole position on the right-hand sidewalk, facing traffic
  LightCycle cycle;
  Segment stop_line;
  double trigger_length = 0.0;  // detection extent behind the pole, metres
  std::optional<LaneId> lane;   // approach lane governed by this light
  LightState state = LightState::green;

  /// Detection extent: from `trigger_length` metres upstream to the pole.
  Segment trigger_segment() const;
};

struct SpeedSign {
  Pose2D pose;
  int limit_kmh = 30;
};

bool valid_speed_limit(int kmh);

enum class ActorKind { vehicle, pedestrian, static_object };

std::string_view to_string(ActorKind k);

enum class ScriptEnd { hold, vanish };

/// Constant-speed motion along a waypoint polyline starting at `start_time`.
struct ActorScript {
  Polyline path;
  double speed = 0.0;
  double start_time = 0.0;
  ScriptEnd at_end = ScriptEnd::hold;
};

struct Actor {
  std::int32_t id = 0;
  ActorKind kind = ActorKind::vehicle;
  Pose2D pose;  // box centre
  double speed = 0.0;
  Vec2 half_extents{2.3, 0.95};
  std::optional<ActorScript> script;
  bool active = true;

  OrientedBox box() const { return {pose.position(), pose.heading, half_extents}; }
};

/// Static description of a town: lanes, sidewalks and regulators as loaded.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  RoadNetwork(std::string name, std::vector<Lane> lanes, std::vector<std::vector<Vec2>> sidewalks);

  const std::string& name() const { return name_; }
  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<std::vector<Vec2>>& sidewalks() const { return sidewalks_; }

  bool contains(LaneId id) const { return index_.count(id) != 0; }
  const Lane& lane(LaneId id) const;

  /// Connectors sharing a predecessor with `id` (including itself), keyed by
  /// the command that selects them. Empty for road lanes.
  const std::map<Command, LaneId>& branch_of(LaneId id) const;
  std::optional<LaneId> predecessor_of(LaneId connector) const;

  /// Closest lane whose local tangent is within `max_heading_error` of
  /// `heading` and whose centerline is within `max_distance`.
  std::optional<LaneId> nearest_lane(Vec2 p, double heading, double max_distance,
                                     double max_heading_error = kPi / 3) const;

  bool on_sidewalk(Vec2 p) const;

  /// True when p lies inside a road lane running against `heading`.
  bool in_opposing_lane(Vec2 p, double heading) const;

 private:
  std::string name_;
  std::vector<Lane> lanes_;
  std::map<LaneId, std::size_t> index_;
  std::map<LaneId, LaneId> predecessor_;
  std::map<LaneId, std::map<Command, LaneId>> branches_;
  std::vector<std::vector<Vec2>> sidewalks_;
};

/// Everything a town file describes.
struct Town {
  std::shared_ptr<const RoadNetwork> network;
  std::vector<TrafficLight> lights;
  std::vector<SpeedSign> signs;
  std::vector<Actor> actors;  // static furniture and scripted actors
};

struct VehicleGeometry {
  double wheelbase = 2.7;
  double front_overhang = 0.95;  // front axle to front bumper
  double rear_overhang = 0.95;
  double half_width = 0.95;

  Vec2 half_extents() const {
    return {0.5 * (wheelbase + front_overhang + rear_overhang), half_width};
  }
};

/// Ego vehicle state: pose of the rear-axle centre plus speed.
struct Ego {
  Pose2D rear_axle;
  double speed = 0.0;
  VehicleGeometry geometry;
  int speed_limit_kmh = 30;  // limit in force at episode start

  Pose2D front_axle() const { return rear_axle.advanced(geometry.wheelbase); }
  Pose2D center() const {
    return rear_axle.advanced(0.5 * (geometry.wheelbase + geometry.front_overhang -
                                     geometry.rear_overhang));
  }
  OrientedBox box() const;
  Actor as_actor() const;
};

/// Ego placed so that its front axle sits at `front_axle`.
Ego ego_from_front_axle(const Pose2D& front_axle, double speed, const VehicleGeometry& geometry = {});

struct WorldState {
  double time = 0.0;
  Ego ego;
  std::vector<Actor> actors;
  std::vector<TrafficLight> lights;
  std::vector<SpeedSign> signs;
  std::shared_ptr<const RoadNetwork> network;
  std::optional<LaneId> ego_lane;  // lane tracked by the episode loop
};

WorldState make_world(const Town& town, const Ego& ego);

class OffRoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace affdrive
