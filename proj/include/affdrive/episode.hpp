#pragma once

// Closed-loop episode: world -> affordances -> perception -> command ->
// control -> vehicle -> world, with a full per-step trace.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "affdrive/affordances.hpp"
#include "affdrive/controller.hpp"
#include "affdrive/dynamics.hpp"
#include "affdrive/infractions.hpp"
#include "affdrive/perception.hpp"
#include "affdrive/route_planner.hpp"
#include "affdrive/town.hpp"

namespace affdrive {

/// A point on a road lane; either given directly or resolved from a pose.
struct LanePoint {
  LaneId lane;
  double s = 0.0;  // arc length along the lane centerline
};

struct LightOverride {
  std::int32_t id = 0;
  LightCycle cycle;
};

struct EpisodeSpec {
  std::string name = "episode";
  std::string town = "town-a";              // built-in name or town file
  std::shared_ptr<const Town> town_data;    // preloaded town; takes precedence
  LanePoint start;                          // ego front axle
  double start_offset = 0.0;                // m, left of the start lane centerline
  LanePoint goal;
  double initial_speed = 0.0;               // m/s
  std::vector<Actor> actors;                // added to the town's actors
  std::vector<LightOverride> lights;
  PerceptionModel perception;
  ControllerConfig controller;
  VehicleParams vehicle;
  double time_limit = 0.0;                  // s; 0 derives it from the route length
  double dt = 0.05;
  double goal_radius = 2.0;
  double activation_distance = kDefaultActivationDistance;
  double debounce = kDefaultDebounce;
  std::uint64_t seed = 0;                   // perception noise stream

  void validate() const;
};

struct TraceRow {
  std::int64_t step = 0;
  double time = 0.0;
  Pose2D pose;  // rear axle
  double speed = 0.0;
  Command command = Command::straight;
  std::int32_t lane = -1;
  Affordances truth;
  PerceivedAffordances perceived;
  ControlOutput control;
  int limit_kmh = 30;
};

enum class Termination { goal, timeout, off_road, no_route };

std::string_view to_string(Termination t);

struct EpisodeResult {
  bool success = false;
  Termination termination = Termination::timeout;
  std::string message;
  double distance_m = 0.0;
  double duration_s = 0.0;
  double route_length_m = 0.0;
  double time_limit_s = 0.0;
  std::vector<InfractionEvent> infractions;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  EpisodeResult result;
};

/// Town for a spec, loading it when not preloaded.
std::shared_ptr<const Town> episode_town(const EpisodeSpec& spec);

/// Initial world: town, scenario actors and light overrides at t = 0, with the
/// ego at the start point.
WorldState initial_world(const EpisodeSpec& spec, const Town& town);

EpisodeTrace run_episode(const EpisodeSpec& spec);

/// Re-derives infraction events from a trace by replaying the scripted world
/// along the recorded ego poses.
std::vector<InfractionEvent> detect_infractions(const std::vector<TraceRow>& rows, const WorldState& initial,
                                                const VehicleGeometry& geometry, double dt, double debounce);

/// Delimited text: a header row with units, then one row per step.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace affdrive
