#pragma once

// Ground-truth affordances computed from the world state and the current
// directional command, using three observation rectangles in the ego frame.

#include <array>
#include <optional>
#include <vector>

#include "affdrive/geometry.hpp"
#include "affdrive/town.hpp"

namespace affdrive {

enum class AreaId { a1, a2, a3 };

/// Axis-aligned rectangle in the ego-local frame (x forward, y left), with
/// the origin at the centre of the front axle.
struct ObservationArea {
  AreaId id;
  double x_min, x_max;
  double y_min, y_max;

  std::array<Vec2, 4> vertices() const;
  /// The rectangle placed in the world for an ego front-axle pose.
  OrientedBox to_world(const Pose2D& front_axle) const;
};

// Signs and lights, to the front right.
inline constexpr ObservationArea kAreaA1{AreaId::a1, 7.4, 14.0, -5.8, -0.8};
// Hazards directly ahead.
inline constexpr ObservationArea kAreaA2{AreaId::a2, 0.0, 8.2, -2.0, 2.0};
// Lead vehicle corridor.
inline constexpr ObservationArea kAreaA3{AreaId::a3, 0.0, 50.0, -1.6, 1.6};

/// Boundary-inclusive membership of a local point.
bool point_in_area(const ObservationArea& area, Vec2 local);

inline constexpr double kMaxVehicleDistance = 50.0;
inline constexpr double kMaxCenterDistance = 2.0;

struct Affordances {
  bool hazard_stop = false;
  bool red_light = false;   // a facing light in A1 that is not green
  std::optional<int> speed_sign;  // km/h, none when no sign is in view
  double vehicle_distance = kMaxVehicleDistance;  // metres, [0, 50]
  double relative_angle = 0.0;                    // rad, ego heading minus path tangent
  double center_distance = 0.0;                   // metres, [-2, 2], positive left of path

  friend bool operator==(const Affordances&, const Affordances&) = default;
};

/// Lanes concatenated into the path the ego should follow for a command.
struct ReferencePath {
  std::vector<LaneId> lanes;
  Polyline path;
  bool substituted = false;  // requested command unavailable at the branch
};

inline constexpr double kOffRoadDistance = 5.0;

/// Successor of `lane` for `command`; when the command is unavailable, the
/// unique successor, else the first of straight/right/left that exists.
/// Second member flags the substitution. Empty when the lane has no successor.
std::optional<std::pair<LaneId, bool>> successor_for(const Lane& lane, Command command);

/// Lane under the front axle: nearest lane aligned with the heading within
/// kOffRoadDistance. Throws OffRoadError when there is none.
LaneId locate_lane(const RoadNetwork& network, const Pose2D& front_axle);

/// Advances `current` along successors (chosen by `command`) while the
/// front axle has run past its end; reacquires when the lane is lost.
LaneId track_lane(const RoadNetwork& network, const Pose2D& front_axle, std::optional<LaneId> current,
                  Command command);

/// Current lane followed by the successor chosen by `command` at the next
/// branch point. On a connector the sibling connector for `command` is used.
ReferencePath select_reference_path(const RoadNetwork& network, LaneId current, Command command);

/// Requires ego within kOffRoadDistance of a lane; throws OffRoadError otherwise.
Affordances compute_affordances(const WorldState& world, Command command);

}  // namespace affdrive
