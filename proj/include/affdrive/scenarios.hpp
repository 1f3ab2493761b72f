#pragma once

// Benchmark tasks, seeded episode generation, and scenario files.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affdrive/episode.hpp"

namespace affdrive {

enum class Task { straight, one_turn, navigation, nav_dynamic };

inline constexpr std::array<Task, 4> kAllTasks = {Task::straight, Task::one_turn, Task::navigation,
                                                  Task::nav_dynamic};

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view s);

/// Number of turn commands on a route.
int count_turns(const Route& route);

/// Splits a 64-bit seed into independent streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic start/goal (and, for nav_dynamic, actors) for episode
/// `index` of `task`. Only geometry is set; perception, controller and
/// vehicle stay at their defaults.
EpisodeSpec generate_episode(const std::shared_ptr<const Town>& town, const std::string& town_name, Task task,
                             int index, std::uint64_t seed);

/// Road-lane point nearest to a pose (heading-aligned, within the off-road distance).
LanePoint lane_point_at(const RoadNetwork& network, Vec2 position, double heading);

/// Centerline from `start` to `goal` along `route`.
Polyline route_polyline(const RoadNetwork& network, const TopoGraph& graph, const Route& route,
                        const LanePoint& start, const LanePoint& goal);

/// Scenario files: town, start, goal, actors, light overrides and optional
/// seed/time limit. Schema in README.md ("Scenario files"). A relative town
/// path is looked up in `base_dir` first, then in the working directory.
EpisodeSpec parse_scenario(const std::string& text, const std::string& source = "<scenario>",
                           const std::filesystem::path& base_dir = {});
EpisodeSpec load_scenario(const std::filesystem::path& path);

}  // namespace affdrive
