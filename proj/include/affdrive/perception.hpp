#pragma once

// Stand-in for a learned affordance predictor: turns ground-truth affordances
// into classifier-style probabilities plus regression noise and latency.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include <boost/random/mersenne_twister.hpp>

#include "affdrive/affordances.hpp"

namespace affdrive {

/// Sign classes in confusion-matrix order: none, 30, 60, 90.
inline constexpr std::array<int, 4> kSignClasses = {0, 30, 60, 90};
int sign_class_index(std::optional<int> sign);
std::optional<int> sign_from_class_index(int index);

struct PerceptionModel {
  std::string name = "clean";
  double p_tp_red = 1.0;
  double p_fp_red = 0.0;
  double p_tp_hazard = 1.0;
  double p_fp_hazard = 0.0;
  // Confidence on detection ~ U[lo, hi]; the complement is emitted otherwise.
  double confidence_lo = 1.0;
  double confidence_hi = 1.0;
  std::array<std::array<double, 4>, 4> sign_confusion{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  double sigma_d = 0.0;      // m
  double sigma_psi = 0.0;    // rad
  double sigma_ell = 0.0;    // m
  int latency_steps = 0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Presets "clean", "train" and "test". Throws on unknown names.
PerceptionModel perception_preset(const std::string& name);
bool is_perception_preset(const std::string& name);

struct PerceivedAffordances {
  Affordances values;
  double p_red = 0.0;
  double p_hazard = 0.0;
};

/// One instance per episode: owns the RNG stream and the latency buffer.
class PerceptionSimulator {
 public:
  explicit PerceptionSimulator(PerceptionModel model);

  PerceivedAffordances perceive(const Affordances& truth);
  const PerceptionModel& model() const { return model_; }

 private:
  double uniform01();
  double gaussian();
  double detection_probability(bool truth, double p_tp, double p_fp);

  PerceptionModel model_;
  boost::random::mt19937_64 rng_;
  std::deque<Affordances> delay_;
};

}  // namespace affdrive
