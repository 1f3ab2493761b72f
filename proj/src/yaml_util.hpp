#pragma once

// Shared YAML helpers for the town, scenario, suite and config readers.

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <string>
#include <vector>

#include "affdrive/geometry.hpp"
#include "affdrive/town.hpp"
#include "affdrive/town_io.hpp"

namespace affdrive::yaml {

/// Shortest round-trip text for a double (yaml-cpp prints 17 digits).
inline std::string num(double v) { return fmt::format("{}", v); }

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] inline void fail(const std::string& source, const YAML::Node& n, const std::string& what) {
  throw LoadError(source, line_of(n), what);
}

template <typename T>
T get(const std::string& source, const YAML::Node& parent, const char* key) {
  const YAML::Node n = parent[key];
  if (!n) fail(source, parent, std::string("missing key '") + key + "'");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(source, n, std::string("bad value for '") + key + "'");
  }
}

template <typename T>
T get_or(const std::string& source, const YAML::Node& parent, const char* key, T fallback) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(source, n, std::string("bad value for '") + key + "'");
  }
}

Vec2 point(const std::string& source, const YAML::Node& n);
std::vector<Vec2> points(const std::string& source, const YAML::Node& n);
Pose2D pose(const std::string& source, const YAML::Node& n);
Actor actor(const std::string& source, const YAML::Node& n);

void emit_point(YAML::Emitter& out, Vec2 p);
void emit_points(YAML::Emitter& out, const std::vector<Vec2>& pts);
void emit_pose(YAML::Emitter& out, const Pose2D& p);
void emit_actor(YAML::Emitter& out, const Actor& a);

}  // namespace affdrive::yaml
