#pragma once

// Run configuration: controller, vehicle, perception and episode settings,
// read from YAML, overridable by dotted `key=value` assignments.

#include <filesystem>
#include <string>

#include "affdrive/controller.hpp"
#include "affdrive/dynamics.hpp"
#include "affdrive/perception.hpp"
#include "affdrive/route_planner.hpp"
#include "affdrive/infractions.hpp"

namespace affdrive {

struct RunConfig {
  ControllerConfig controller;
  VehicleParams vehicle;
  PerceptionModel perception;  // "clean" preset by default
  double dt = 0.05;
  double goal_radius = 2.0;
  double activation_distance = kDefaultActivationDistance;
  double debounce = kDefaultDebounce;

  void validate() const;
};

/// YAML with sections controller, vehicle, perception and episode; all keys
/// are printed by dump_config. Missing keys keep `base` values; unknown keys
/// are errors.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>",
                       const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});
std::string dump_config(const RunConfig& config);

/// Applies "section.key=value" (nested keys allowed, e.g.
/// controller.cruise_gains.kp=0.4). Throws std::invalid_argument on unknown
/// keys or malformed values.
void apply_override(RunConfig& config, const std::string& assignment);

/// Perception model files: optional `preset` to start from, then any model field.
PerceptionModel parse_perception_model(const std::string& text, const std::string& source = "<perception>");
PerceptionModel load_perception_model(const std::filesystem::path& path);

}  // namespace affdrive
