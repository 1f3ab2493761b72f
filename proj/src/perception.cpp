#include "affdrive/perception.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace affdrive {

int sign_class_index(std::optional<int> sign) {
  if (!sign) return 0;
  for (int i = 1; i < 4; ++i) {
    if (kSignClasses[i] == *sign) return i;
  }
  throw std::invalid_argument("speed sign " + std::to_string(*sign) + " is not a sign class");
}

std::optional<int> sign_from_class_index(int index) {
  if (index == 0) return std::nullopt;
  return kSignClasses.at(index);
}

void PerceptionModel::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
  };
  prob(p_tp_red, "p_tp_red");
  prob(p_fp_red, "p_fp_red");
  prob(p_tp_hazard, "p_tp_hazard");
  prob(p_fp_hazard, "p_fp_hazard");
  prob(confidence_lo, "confidence_lo");
  prob(confidence_hi, "confidence_hi");
  if (confidence_lo > confidence_hi) throw std::invalid_argument("confidence_lo exceeds confidence_hi");
  for (const auto& row : sign_confusion) {
    double sum = 0.0;
    for (double p : row) {
      prob(p, "sign_confusion entries");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("sign_confusion rows must sum to 1");
  }
  if (!(sigma_d >= 0.0 && sigma_psi >= 0.0 && sigma_ell >= 0.0)) {
    throw std::invalid_argument("noise sigmas must be non-negative");
  }
  if (latency_steps < 0) throw std::invalid_argument("latency_steps must be >= 0");
}

namespace {

// `none_keep` applies to frames without a sign. Those dominate a drive and a
// phantom sign persists in the limit memory, so they are kept far more often.
std::array<std::array<double, 4>, 4> confusion_with_diagonal(double none_keep, double sign_keep) {
  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i) {
    const double keep = i == 0 ? none_keep : sign_keep;
    const double spread = (1.0 - keep) / 3.0;
    for (int j = 0; j < 4; ++j) m[i][j] = i == j ? keep : spread;
  }
  return m;
}

}  // namespace

bool is_perception_preset(const std::string& name) {
  return name == "clean" || name == "train" || name == "test";
}

PerceptionModel perception_preset(const std::string& name) {
  PerceptionModel m;
  m.name = name;
  if (name == "clean") return m;
  if (name == "train") {
    m.p_tp_red = 0.98;
    m.p_fp_red = 0.002;
    m.p_tp_hazard = 0.99;
    m.p_fp_hazard = 0.001;
    m.confidence_lo = 0.92;
    m.confidence_hi = 1.0;
    m.sign_confusion = confusion_with_diagonal(0.9995, 0.97);
    m.sigma_d = 0.05;
    m.sigma_psi = 0.01;
    m.sigma_ell = 0.5;
    m.latency_steps = 1;
    return m;
  }
  if (name == "test") {
    m.p_tp_red = 0.95;
    m.p_fp_red = 0.005;
    m.p_tp_hazard = 0.97;
    m.p_fp_hazard = 0.003;
    m.confidence_lo = 0.85;
    m.confidence_hi = 1.0;
    m.sign_confusion = confusion_with_diagonal(0.998, 0.92);
    m.sigma_d = 0.1;
    m.sigma_psi = 0.02;
    m.sigma_ell = 1.0;
    m.latency_steps = 2;
    return m;
  }
  throw std::invalid_argument("unknown perception preset '" + name + "'");
}

PerceptionSimulator::PerceptionSimulator(PerceptionModel model) : model_(std::move(model)), rng_(model_.seed) {
  model_.validate();
}

double PerceptionSimulator::uniform01() { return boost::random::uniform_01<double>()(rng_); }

double PerceptionSimulator::gaussian() { return boost::random::normal_distribution<double>()(rng_); }

double PerceptionSimulator::detection_probability(bool truth, double p_tp, double p_fp) {
  const bool detected = uniform01() < (truth ? p_tp : p_fp);
  const double confidence =
      model_.confidence_lo + (model_.confidence_hi - model_.confidence_lo) * uniform01();
  return detected ? confidence : 1.0 - confidence;
}

PerceivedAffordances PerceptionSimulator::perceive(const Affordances& truth) {
  if (delay_.empty()) delay_.assign(static_cast<std::size_t>(model_.latency_steps), truth);
  delay_.push_back(truth);
  const Affordances t = delay_.front();
  delay_.pop_front();

  // Draw order is fixed so the stream depends only on the seed and step count.
  PerceivedAffordances out;
  out.p_red = detection_probability(t.red_light, model_.p_tp_red, model_.p_fp_red);
  out.p_hazard = detection_probability(t.hazard_stop, model_.p_tp_hazard, model_.p_fp_hazard);
  out.values.red_light = out.p_red >= 0.5;
  out.values.hazard_stop = out.p_hazard >= 0.5;

  const auto& row = model_.sign_confusion[sign_class_index(t.speed_sign)];
  const double u = uniform01();
  int cls = 3;
  double cumulative = 0.0;
  for (int j = 0; j < 4; ++j) {
    cumulative += row[j];
    if (u < cumulative) {
      cls = j;
      break;
    }
  }
  out.values.speed_sign = sign_from_class_index(cls);

  const double nd = gaussian();
  const double npsi = gaussian();
  const double nell = gaussian();
  double d = t.center_distance;
  double psi = t.relative_angle;
  double ell = t.vehicle_distance;
  if (model_.sigma_d > 0.0) d += model_.sigma_d * nd;
  if (model_.sigma_psi > 0.0) psi += model_.sigma_psi * npsi;
  if (model_.sigma_ell > 0.0) ell += model_.sigma_ell * nell;
  out.values.center_distance = std::clamp(d, -kMaxCenterDistance, kMaxCenterDistance);
  out.values.relative_angle = std::clamp(psi, -kPi, kPi);
  out.values.vehicle_distance = std::clamp(ell, 0.0, kMaxVehicleDistance);
  return out;
}

}  // namespace affdrive
