#include "affdrive/episode.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "affdrive/metrics.hpp"
#include "affdrive/town_io.hpp"

namespace affdrive {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::goal: return "goal";
    case Termination::timeout: return "timeout";
    case Termination::off_road: return "off_road";
    case Termination::no_route: return "no_route";
  }
  return "timeout";
}

void EpisodeSpec::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (time_limit < 0.0) throw std::invalid_argument("time_limit must be non-negative");
  if (!(goal_radius > 0.0)) throw std::invalid_argument("goal_radius must be positive");
  if (!(initial_speed >= 0.0)) throw std::invalid_argument("initial speed must be non-negative");
  perception.validate();
  controller.validate();
  vehicle.validate();
}

std::shared_ptr<const Town> episode_town(const EpisodeSpec& spec) {
  if (spec.town_data) return spec.town_data;
  return std::make_shared<const Town>(resolve_town(spec.town));
}

WorldState initial_world(const EpisodeSpec& spec, const Town& town) {
  const Lane& lane = town.network->lane(spec.start.lane);
  const double heading = lane.centerline.heading_at(spec.start.s);
  const Vec2 p = lane.centerline.point_at(spec.start.s) + spec.start_offset * unit_from_heading(heading + kPi / 2.0);
  VehicleGeometry geometry;
  geometry.wheelbase = spec.vehicle.wheelbase;
  Ego ego = ego_from_front_axle(make_pose(p.x, p.y, heading),
                                spec.initial_speed, geometry);
  ego.speed_limit_kmh = lane.speed_limit_kmh;
  WorldState world = make_world(town, ego);
  for (const Actor& a : spec.actors) world.actors.push_back(a);
  for (const LightOverride& o : spec.lights) {
    bool found = false;
    for (TrafficLight& l : world.lights) {
      if (l.id == o.id) {
        l.cycle = o.cycle;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("light override for unknown light " + std::to_string(o.id));
  }
  world.ego_lane = spec.start.lane;
  apply_schedules(world);
  return world;
}

EpisodeTrace run_episode(const EpisodeSpec& spec) {
  spec.validate();
  const std::shared_ptr<const Town> town = episode_town(spec);
  const RoadNetwork& net = *town->network;
  EpisodeTrace trace;
  EpisodeResult& result = trace.result;

  const TopoGraph graph = build_topo_graph(net);
  Route route;
  try {
    route = plan_lane_route(graph, net, spec.start.lane, spec.start.s, spec.goal.lane, spec.goal.s);
  } catch (const NoRouteError& e) {
    result.termination = Termination::no_route;
    result.message = e.what();
    return trace;
  }
  result.route_length_m = route.length;
  result.time_limit_s = spec.time_limit > 0.0 ? spec.time_limit : time_limit(std::max(route.length, 1.0));
  const Vec2 goal = net.lane(spec.goal.lane).centerline.point_at(spec.goal.s);

  RouteCursor cursor(graph, net, std::move(route), spec.activation_distance);
  PerceptionModel model = spec.perception;
  model.seed = spec.seed;
  PerceptionSimulator perception(model);
  WorldState world = initial_world(spec, *town);
  Controller controller(spec.controller, world.ego.speed_limit_kmh);
  InfractionDetector detector(spec.debounce);
  WorldState prev;

  for (std::int64_t k = 0;; ++k) {
    if (k > 0) detector.observe(prev, world, result.infractions);
    const Pose2D front = world.ego.front_axle();
    if (distance(front.position(), goal) <= spec.goal_radius) {
      result.success = true;
      result.termination = Termination::goal;
      break;
    }
    if (world.time >= result.time_limit_s) {
      result.termination = Termination::timeout;
      break;
    }
    const Command command = cursor.next_command(front).value_or(Command::straight);
    Affordances truth;
    try {
      world.ego_lane = track_lane(net, front, world.ego_lane, command);
      truth = compute_affordances(world, command);
    } catch (const OffRoadError& e) {
      result.termination = Termination::off_road;
      result.message = e.what();
      break;
    }
    const PerceivedAffordances perceived = perception.perceive(truth);
    const ControlOutput control = controller.step(perceived, world.ego.speed, command, spec.dt);

    TraceRow row;
    row.step = k;
    row.time = world.time;
    row.pose = world.ego.rear_axle;
    row.speed = world.ego.speed;
    row.command = command;
    row.lane = world.ego_lane->value;
    row.truth = truth;
    row.perceived = perceived;
    row.control = control;
    row.limit_kmh = controller.speed_limit();
    trace.rows.push_back(row);

    prev = world;
    const Ego ego = step_vehicle(world.ego, control.throttle, control.brake, control.steer, spec.vehicle, spec.dt);
    result.distance_m += distance(ego.rear_axle.position(), world.ego.rear_axle.position());
    world = step_world(world, spec.dt);
    world.ego = ego;
  }
  result.duration_s = world.time;
  return trace;
}

std::vector<InfractionEvent> detect_infractions(const std::vector<TraceRow>& rows, const WorldState& initial,
                                                const VehicleGeometry& geometry, double dt, double debounce) {
  std::vector<InfractionEvent> events;
  if (rows.empty()) return events;
  InfractionDetector detector(debounce);
  WorldState world = initial;
  world.ego.geometry = geometry;
  world.ego.rear_axle = rows.front().pose;
  world.ego.speed = rows.front().speed;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const WorldState prev = world;
    world = step_world(world, dt);
    world.ego.rear_axle = rows[k].pose;
    world.ego.speed = rows[k].speed;
    detector.observe(prev, world, events);
  }
  return events;
}

// --- trace files -----------------------------------------------------------

namespace {

constexpr const char* kTraceHeader =
    "step,time_s,x_m,y_m,heading_rad,speed_mps,command,lane,"
    "hazard_stop,red_light,speed_sign_kmh,vehicle_distance_m,relative_angle_rad,center_distance_m,"
    "p_hazard,p_red,perceived_hazard_stop,perceived_red_light,perceived_speed_sign_kmh,"
    "perceived_vehicle_distance_m,perceived_relative_angle_rad,perceived_center_distance_m,"
    "state,throttle,brake,steer_rad,limit_kmh";

std::string sign_text(std::optional<int> sign) { return sign ? std::to_string(*sign) : "none"; }

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in trace: '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t to_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad integer in trace: '" + std::string(s) + "'");
  }
  return v;
}

std::optional<int> to_sign(std::string_view s) {
  if (s == "none") return std::nullopt;
  return static_cast<int>(to_int(s));
}

LongitudinalState to_state(std::string_view s) {
  for (auto st : {LongitudinalState::cruising, LongitudinalState::following, LongitudinalState::over_limit,
                  LongitudinalState::red_light, LongitudinalState::hazard_stop}) {
    if (to_string(st) == s) return st;
  }
  throw std::runtime_error("bad state in trace: '" + std::string(s) + "'");
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  fmt::memory_buffer buf;
  for (const TraceRow& r : rows) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},", r.step, r.time, r.pose.x, r.pose.y,
                   r.pose.heading, r.speed, to_string(r.command), r.lane);
    const Affordances& t = r.truth;
    fmt::format_to(std::back_inserter(buf), "{:d},{:d},{},{},{},{},", t.hazard_stop, t.red_light,
                   sign_text(t.speed_sign), t.vehicle_distance, t.relative_angle, t.center_distance);
    const Affordances& p = r.perceived.values;
    fmt::format_to(std::back_inserter(buf), "{},{},{:d},{:d},{},{},{},{},", r.perceived.p_hazard,
                   r.perceived.p_red, p.hazard_stop, p.red_light, sign_text(p.speed_sign), p.vehicle_distance,
                   p.relative_angle, p.center_distance);
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", to_string(r.control.state), r.control.throttle,
                   r.control.brake, r.control.steer, r.limit_kmh);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("trace header mismatch");
  std::vector<TraceRow> rows;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    f.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        f.emplace_back(line.data() + start, i - start);
        start = i + 1;
      }
    }
    if (f.size() != 27) throw std::runtime_error("trace row with " + std::to_string(f.size()) + " fields");
    TraceRow r;
    r.step = to_int(f[0]);
    r.time = to_double(f[1]);
    r.pose = {to_double(f[2]), to_double(f[3]), to_double(f[4])};
    r.speed = to_double(f[5]);
    const auto cmd = parse_command(f[6]);
    if (!cmd) throw std::runtime_error("bad command in trace");
    r.command = *cmd;
    r.lane = static_cast<std::int32_t>(to_int(f[7]));
    r.truth.hazard_stop = to_int(f[8]) != 0;
    r.truth.red_light = to_int(f[9]) != 0;
    r.truth.speed_sign = to_sign(f[10]);
    r.truth.vehicle_distance = to_double(f[11]);
    r.truth.relative_angle = to_double(f[12]);
    r.truth.center_distance = to_double(f[13]);
    r.perceived.p_hazard = to_double(f[14]);
    r.perceived.p_red = to_double(f[15]);
    r.perceived.values.hazard_stop = to_int(f[16]) != 0;
    r.perceived.values.red_light = to_int(f[17]) != 0;
    r.perceived.values.speed_sign = to_sign(f[18]);
    r.perceived.values.vehicle_distance = to_double(f[19]);
    r.perceived.values.relative_angle = to_double(f[20]);
    r.perceived.values.center_distance = to_double(f[21]);
    r.control.state = to_state(f[22]);
    r.control.throttle = to_double(f[23]);
    r.control.brake = to_double(f[24]);
    r.control.steer = to_double(f[25]);
    r.limit_kmh = static_cast<int>(to_int(f[26]));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace affdrive
