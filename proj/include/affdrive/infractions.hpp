#pragma once

// Rule violations observed between consecutive world states, debounced so a
// continuous violation is reported once.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "affdrive/town.hpp"

namespace affdrive {

enum class InfractionKind {
  opposite_lane,
  sidewalk,
  collision_static,
  collision_car,
  collision_pedestrian,
  red_light_violation,
};

inline constexpr std::array<InfractionKind, 6> kAllInfractionKinds = {
    InfractionKind::opposite_lane,     InfractionKind::sidewalk,
    InfractionKind::collision_static,  InfractionKind::collision_car,
    InfractionKind::collision_pedestrian, InfractionKind::red_light_violation};

std::string_view to_string(InfractionKind k);
std::optional<InfractionKind> parse_infraction_kind(std::string_view s);

struct InfractionEvent {
  InfractionKind kind = InfractionKind::opposite_lane;
  double time = 0.0;
  Vec2 position;  // ego centre

  friend bool operator==(const InfractionEvent&, const InfractionEvent&) = default;
};

inline constexpr double kDefaultDebounce = 2.0;

/// Raw (undebounced) conditions for the transition prev -> now.
std::array<bool, 6> infraction_conditions(const WorldState& prev, const WorldState& now);

class InfractionDetector {
 public:
  explicit InfractionDetector(double debounce_s = kDefaultDebounce) : debounce_(debounce_s) {}

  /// Appends the events raised by the transition prev -> now.
  void observe(const WorldState& prev, const WorldState& now, std::vector<InfractionEvent>& events);

 private:
  struct Channel {
    bool armed = true;
    double last_active = 0.0;
  };

  double debounce_;
  std::array<Channel, 6> channels_{};
};

}  // namespace affdrive
