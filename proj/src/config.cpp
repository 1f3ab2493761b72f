#include "affdrive/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "affdrive/town_io.hpp"
#include "yaml_util.hpp"

namespace affdrive {

void RunConfig::validate() const {
  controller.validate();
  vehicle.validate();
  perception.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("episode.dt must be positive");
  if (!(goal_radius > 0.0)) throw std::invalid_argument("episode.goal_radius must be positive");
  if (!(activation_distance > 0.0)) throw std::invalid_argument("episode.activation_distance must be positive");
  if (!(debounce >= 0.0)) throw std::invalid_argument("episode.debounce must be non-negative");
}

namespace {

// Reads a mapping and rejects keys nobody asked for.
class Section {
 public:
  Section(const std::string& src, const YAML::Node& node, std::string path)
      : src_(src), node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) yaml::fail(src_, node_, "'" + path_ + "' must be a mapping");
  }

  ~Section() noexcept(false) {
    if (!node_ || std::uncaught_exceptions() > 0) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) yaml::fail(src_, kv.first, "unknown key '" + path_ + "." + key + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& value) {
    seen_.insert(key);
    if (node_) value = yaml::get_or<T>(src_, node_, key, value);
  }

  void read_optional(const char* key, std::optional<double>& value) {
    seen_.insert(key);
    if (!node_ || !cnode()[key]) return;
    const YAML::Node n = cnode()[key];
    if (n.IsNull()) {
      value.reset();
    } else {
      value = yaml::get<double>(src_, node_, key);
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    return Section(src_, node_ ? cnode()[key] : node_, path_ + "." + key);
  }

  YAML::Node raw(const char* key) {
    seen_.insert(key);
    return node_ ? cnode()[key] : node_;
  }

  const std::string& source() const { return src_; }

 private:
  const YAML::Node& cnode() const { return node_; }

  const std::string& src_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_gains(Section s, PidGains& g) {
  s.read("kp", g.kp);
  s.read("ki", g.ki);
  s.read("kd", g.kd);
}

void read_controller(Section s, ControllerConfig& c) {
  s.read("p_red_threshold", c.p_red_threshold);
  s.read("p_hazard_threshold", c.p_hazard_threshold);
  s.read("follow_trigger_m", c.follow_trigger);
  s.read("over_limit_margin_kmh", c.over_limit_margin);
  s.read("turn_speed_reduction_kmh", c.turn_speed_reduction);
  s.read_optional("cruise_cap_kmh", c.cruise_cap);
  s.read("following_c", c.following_c);
  s.read("following_d", c.following_d);
  s.read("stanley_k", c.stanley_k);
  s.read("stanley_v_eps", c.stanley_v_eps);
  s.read("damping", c.damping);
  s.read("steer_limit_rad", c.steer_limit);
  s.read("integral_limit", c.integral_limit);
  read_gains(s.sub("cruise_gains"), c.cruise_gains);
  read_gains(s.sub("follow_gains"), c.follow_gains);
  s.read("follow_brake", c.follow_brake);
}

void read_vehicle(Section s, VehicleParams& v) {
  s.read("wheelbase", v.wheelbase);
  s.read("a_max", v.a_max);
  s.read("b_max", v.b_max);
  s.read("drag", v.drag);
}

void read_perception(Section s, PerceptionModel& m) {
  if (const YAML::Node preset = s.raw("preset")) {
    try {
      m = perception_preset(preset.as<std::string>());
    } catch (const std::invalid_argument& e) {
      yaml::fail(s.source(), preset, e.what());
    }
  }
  s.read("name", m.name);
  s.read("p_tp_red", m.p_tp_red);
  s.read("p_fp_red", m.p_fp_red);
  s.read("p_tp_hazard", m.p_tp_hazard);
  s.read("p_fp_hazard", m.p_fp_hazard);
  s.read("confidence_lo", m.confidence_lo);
  s.read("confidence_hi", m.confidence_hi);
  if (const YAML::Node c = s.raw("sign_confusion")) {
    if (!c.IsSequence() || c.size() != 4) yaml::fail(s.source(), c, "sign_confusion must be 4 rows");
    for (std::size_t i = 0; i < 4; ++i) {
      if (!c[i].IsSequence() || c[i].size() != 4) yaml::fail(s.source(), c[i], "sign_confusion rows need 4 entries");
      for (std::size_t j = 0; j < 4; ++j) m.sign_confusion[i][j] = c[i][j].as<double>();
    }
  }
  s.read("sigma_d", m.sigma_d);
  s.read("sigma_psi", m.sigma_psi);
  s.read("sigma_ell", m.sigma_ell);
  s.read("latency_steps", m.latency_steps);
}

void read_config(const std::string& src, const YAML::Node& root, RunConfig& cfg) {
  Section top(src, root, "config");
  read_controller(top.sub("controller"), cfg.controller);
  read_vehicle(top.sub("vehicle"), cfg.vehicle);
  read_perception(top.sub("perception"), cfg.perception);
  Section ep = top.sub("episode");
  ep.read("dt", cfg.dt);
  ep.read("goal_radius", cfg.goal_radius);
  ep.read("activation_distance", cfg.activation_distance);
  ep.read("debounce", cfg.debounce);
}

void emit_gains(YAML::Emitter& out, const char* key, const PidGains& g) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kp" << YAML::Value << yaml::num(g.kp);
  out << YAML::Key << "ki" << YAML::Value << yaml::num(g.ki);
  out << YAML::Key << "kd" << YAML::Value << yaml::num(g.kd);
  out << YAML::EndMap;
}

void emit_kv(YAML::Emitter& out, const char* key, double v) {
  out << YAML::Key << key << YAML::Value << yaml::num(v);
}

YAML::Node parse_root(const std::string& text, const std::string& src) {
  try {
    YAML::Node root = YAML::Load(text);
    if (root && !root.IsNull() && !root.IsMap()) throw LoadError(src, 0, "expected a mapping");
    return root.IsNull() ? YAML::Node() : root;
  } catch (const YAML::ParserException& e) {
    throw LoadError(src, e.mark.line + 1, e.msg);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& src, const RunConfig& base) {
  RunConfig cfg = base;
  read_config(src, parse_root(text, src), cfg);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw LoadError(src, 0, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  return parse_config(read_file(path), path.string(), base);
}

std::string dump_config(const RunConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  const ControllerConfig& c = cfg.controller;
  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  emit_kv(out, "p_red_threshold", c.p_red_threshold);
  emit_kv(out, "p_hazard_threshold", c.p_hazard_threshold);
  emit_kv(out, "follow_trigger_m", c.follow_trigger);
  emit_kv(out, "over_limit_margin_kmh", c.over_limit_margin);
  emit_kv(out, "turn_speed_reduction_kmh", c.turn_speed_reduction);
  out << YAML::Key << "cruise_cap_kmh" << YAML::Value;
  if (c.cruise_cap) {
    out << yaml::num(*c.cruise_cap);
  } else {
    out << YAML::Null;
  }
  emit_kv(out, "following_c", c.following_c);
  emit_kv(out, "following_d", c.following_d);
  emit_kv(out, "stanley_k", c.stanley_k);
  emit_kv(out, "stanley_v_eps", c.stanley_v_eps);
  emit_kv(out, "damping", c.damping);
  emit_kv(out, "steer_limit_rad", c.steer_limit);
  emit_kv(out, "integral_limit", c.integral_limit);
  emit_gains(out, "cruise_gains", c.cruise_gains);
  emit_gains(out, "follow_gains", c.follow_gains);
  out << YAML::Key << "follow_brake" << YAML::Value << c.follow_brake;
  out << YAML::EndMap;

  out << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap;
  emit_kv(out, "wheelbase", cfg.vehicle.wheelbase);
  emit_kv(out, "a_max", cfg.vehicle.a_max);
  emit_kv(out, "b_max", cfg.vehicle.b_max);
  emit_kv(out, "drag", cfg.vehicle.drag);
  out << YAML::EndMap;

  const PerceptionModel& m = cfg.perception;
  out << YAML::Key << "perception" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << m.name;
  emit_kv(out, "p_tp_red", m.p_tp_red);
  emit_kv(out, "p_fp_red", m.p_fp_red);
  emit_kv(out, "p_tp_hazard", m.p_tp_hazard);
  emit_kv(out, "p_fp_hazard", m.p_fp_hazard);
  emit_kv(out, "confidence_lo", m.confidence_lo);
  emit_kv(out, "confidence_hi", m.confidence_hi);
  out << YAML::Key << "sign_confusion" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : m.sign_confusion) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double p : row) out << yaml::num(p);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  emit_kv(out, "sigma_d", m.sigma_d);
  emit_kv(out, "sigma_psi", m.sigma_psi);
  emit_kv(out, "sigma_ell", m.sigma_ell);
  out << YAML::Key << "latency_steps" << YAML::Value << m.latency_steps;
  out << YAML::EndMap;

  out << YAML::Key << "episode" << YAML::Value << YAML::BeginMap;
  emit_kv(out, "dt", cfg.dt);
  emit_kv(out, "goal_radius", cfg.goal_radius);
  emit_kv(out, "activation_distance", cfg.activation_distance);
  emit_kv(out, "debounce", cfg.debounce);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  // Build a one-key document and read it through the strict parser.
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= key.size(); ++i) {
    if (i == key.size() || key[i] == '.') {
      if (i == start) throw std::invalid_argument("empty component in key '" + key + "'");
      parts.push_back(key.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() < 2) throw std::invalid_argument("override key '" + key + "' needs a section");
  YAML::Node leaf;
  try {
    leaf = YAML::Load(value.empty() ? "~" : value);
  } catch (const YAML::Exception&) {
    throw std::invalid_argument("bad value in override '" + assignment + "'");
  }
  YAML::Node doc(YAML::NodeType::Map);
  YAML::Node cursor = doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    cursor[parts[i]] = YAML::Node(YAML::NodeType::Map);
    cursor.reset(cursor[parts[i]]);
  }
  cursor[parts.back()] = leaf;
  try {
    RunConfig next = cfg;
    read_config("--set " + key, doc, next);
    next.validate();
    cfg = next;
  } catch (const LoadError& e) {
    throw std::invalid_argument(e.what());
  }
}

PerceptionModel parse_perception_model(const std::string& text, const std::string& src) {
  PerceptionModel m;
  read_perception(Section(src, parse_root(text, src), "perception"), m);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw LoadError(src, 0, e.what());
  }
  return m;
}

PerceptionModel load_perception_model(const std::filesystem::path& path) {
  PerceptionModel m = parse_perception_model(read_file(path), path.string());
  if (m.name == "clean") m.name = path.stem().string();
  return m;
}

}  // namespace affdrive
