#include "qrocket/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qrocket/errors.hpp"

namespace qrocket::harness {

using nlohmann::json;

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean value for '" + key + "': " + v);
}

std::string strip_quotes(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

}  // namespace

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"agent", [](RunConfig& c, const std::string& v) { c.agent = strip_quotes(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_long("seed", v)); }},
      {"episodes", [](RunConfig& c, const std::string& v) { c.episodes = parse_long("episodes", v); }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = strip_quotes(v); }},
      // environment
      {"gravity", [](RunConfig& c, const std::string& v) { c.env.gravity = parse_double("gravity", v); }},
      {"dt", [](RunConfig& c, const std::string& v) { c.env.dt = parse_double("dt", v); }},
      {"wind_max", [](RunConfig& c, const std::string& v) { c.env.wind_max = parse_double("wind_max", v); }},
      {"turbulence_max", [](RunConfig& c, const std::string& v) { c.env.turbulence_max = parse_double("turbulence_max", v); }},
      {"main_thrust", [](RunConfig& c, const std::string& v) { c.env.main_thrust = parse_double("main_thrust", v); }},
      {"side_thrust", [](RunConfig& c, const std::string& v) { c.env.side_thrust = parse_double("side_thrust", v); }},
      {"mass", [](RunConfig& c, const std::string& v) { c.env.mass = parse_double("mass", v); }},
      {"inertia", [](RunConfig& c, const std::string& v) { c.env.inertia = parse_double("inertia", v); }},
      {"side_engine_arm", [](RunConfig& c, const std::string& v) { c.env.side_engine_arm = parse_double("side_engine_arm", v); }},
      {"leg_span", [](RunConfig& c, const std::string& v) { c.env.leg_span = parse_double("leg_span", v); }},
      {"leg_drop", [](RunConfig& c, const std::string& v) { c.env.leg_drop = parse_double("leg_drop", v); }},
      {"body_radius", [](RunConfig& c, const std::string& v) { c.env.body_radius = parse_double("body_radius", v); }},
      {"ground_friction", [](RunConfig& c, const std::string& v) { c.env.ground_friction = parse_double("ground_friction", v); }},
      {"rest_speed", [](RunConfig& c, const std::string& v) { c.env.rest_speed = parse_double("rest_speed", v); }},
      {"rest_omega", [](RunConfig& c, const std::string& v) { c.env.rest_omega = parse_double("rest_omega", v); }},
      {"max_steps", [](RunConfig& c, const std::string& v) { c.env.max_steps = static_cast<int>(parse_long("max_steps", v)); }},
      {"x_limit", [](RunConfig& c, const std::string& v) { c.env.x_limit = parse_double("x_limit", v); }},
      {"init_x_range", [](RunConfig& c, const std::string& v) { c.env.init_x_range = parse_double("init_x_range", v); }},
      {"init_y", [](RunConfig& c, const std::string& v) { c.env.init_y = parse_double("init_y", v); }},
      {"init_vx_range", [](RunConfig& c, const std::string& v) { c.env.init_vx_range = parse_double("init_vx_range", v); }},
      {"init_vy_low", [](RunConfig& c, const std::string& v) { c.env.init_vy_low = parse_double("init_vy_low", v); }},
      {"init_angle_range", [](RunConfig& c, const std::string& v) { c.env.init_angle_range = parse_double("init_angle_range", v); }},
      {"init_omega_range", [](RunConfig& c, const std::string& v) { c.env.init_omega_range = parse_double("init_omega_range", v); }},
      // reward
      {"xi", [](RunConfig& c, const std::string& v) { c.reward.xi = parse_double("xi", v); }},
      {"mu", [](RunConfig& c, const std::string& v) { c.reward.mu = parse_double("mu", v); }},
      {"chi", [](RunConfig& c, const std::string& v) { c.reward.chi = parse_double("chi", v); }},
      {"kappa_land", [](RunConfig& c, const std::string& v) { c.reward.kappa_land = parse_double("kappa_land", v); }},
      {"kappa_crash", [](RunConfig& c, const std::string& v) { c.reward.kappa_crash = parse_double("kappa_crash", v); }},
      // agent
      {"gamma", [](RunConfig& c, const std::string& v) { c.agent_cfg.gamma = parse_double("gamma", v); }},
      {"lr", [](RunConfig& c, const std::string& v) { c.agent_cfg.lr = parse_double("lr", v); }},
      {"hidden_layers", [](RunConfig& c, const std::string& v) { c.agent_cfg.hidden_layers = static_cast<int>(parse_long("hidden_layers", v)); }},
      {"width", [](RunConfig& c, const std::string& v) { c.agent_cfg.width = static_cast<int>(parse_long("width", v)); }},
      {"vqc_depth", [](RunConfig& c, const std::string& v) { c.agent_cfg.vqc_depth = static_cast<int>(parse_long("vqc_depth", v)); }},
      {"ac_entropy", [](RunConfig& c, const std::string& v) { c.agent_cfg.ac_entropy = parse_double("ac_entropy", v); }},
      {"ac_rollout", [](RunConfig& c, const std::string& v) { c.agent_cfg.ac_rollout = static_cast<int>(parse_long("ac_rollout", v)); }},
      {"vqc_lr", [](RunConfig& c, const std::string& v) { c.agent_cfg.vqc_lr = parse_double("vqc_lr", v); }},
      {"vqc_output_lr", [](RunConfig& c, const std::string& v) { c.agent_cfg.vqc_output_lr = parse_double("vqc_output_lr", v); }},
      {"encoder_entangler", [](RunConfig& c, const std::string& v) { c.agent_cfg.encoder_entangler = parse_bool("encoder_entangler", v); }},
      {"replay_capacity", [](RunConfig& c, const std::string& v) { c.agent_cfg.replay_capacity = static_cast<std::size_t>(parse_long("replay_capacity", v)); }},
      {"batch_size", [](RunConfig& c, const std::string& v) { c.agent_cfg.batch_size = static_cast<int>(parse_long("batch_size", v)); }},
      {"target_sync", [](RunConfig& c, const std::string& v) { c.agent_cfg.target_sync = static_cast<int>(parse_long("target_sync", v)); }},
      {"warmup", [](RunConfig& c, const std::string& v) { c.agent_cfg.warmup = static_cast<std::size_t>(parse_long("warmup", v)); }},
      // exploration
      {"eps_start", [](RunConfig& c, const std::string& v) { c.eps.eps_start = parse_double("eps_start", v); }},
      {"eps_end", [](RunConfig& c, const std::string& v) { c.eps.eps_end = parse_double("eps_end", v); }},
      {"eps_decay", [](RunConfig& c, const std::string& v) { c.eps.decay = parse_double("eps_decay", v); }},
  };

  const auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown configuration key: " + key);
  it->second(cfg, value);
}

void load_toml_into(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comment (naive: '#' outside quotes)
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.erase(i);
        break;
      }
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_key_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

json config_echo(const RunConfig& c) {
  json j;
  j["agent"] = c.agent;
  j["seed"] = c.seed;
  j["episodes"] = c.episodes;
  j["out_dir"] = c.out_dir;
  j["env"] = {{"gravity", c.env.gravity},
              {"dt", c.env.dt},
              {"wind_max", c.env.wind_max},
              {"turbulence_max", c.env.turbulence_max},
              {"main_thrust", c.env.main_thrust},
              {"side_thrust", c.env.side_thrust},
              {"mass", c.env.mass},
              {"inertia", c.env.inertia},
              {"side_engine_arm", c.env.side_engine_arm},
              {"leg_span", c.env.leg_span},
              {"leg_drop", c.env.leg_drop},
              {"body_radius", c.env.body_radius},
              {"ground_friction", c.env.ground_friction},
              {"rest_speed", c.env.rest_speed},
              {"rest_omega", c.env.rest_omega},
              {"max_steps", c.env.max_steps},
              {"x_limit", c.env.x_limit},
              {"init_x_range", c.env.init_x_range},
              {"init_y", c.env.init_y},
              {"init_vx_range", c.env.init_vx_range},
              {"init_vy_low", c.env.init_vy_low},
              {"init_angle_range", c.env.init_angle_range},
              {"init_omega_range", c.env.init_omega_range}};
  j["reward"] = {{"xi", c.reward.xi},
                 {"mu", c.reward.mu},
                 {"chi", c.reward.chi},
                 {"kappa_land", c.reward.kappa_land},
                 {"kappa_crash", c.reward.kappa_crash}};
  j["agent_cfg"] = {{"gamma", c.agent_cfg.gamma},
                    {"lr", c.agent_cfg.lr},
                    {"hidden_layers", c.agent_cfg.hidden_layers},
                    {"width", c.agent_cfg.width},
                    {"vqc_depth", c.agent_cfg.vqc_depth},
                    {"ac_entropy", c.agent_cfg.ac_entropy},
                    {"ac_rollout", c.agent_cfg.ac_rollout},
                    {"vqc_lr", c.agent_cfg.vqc_lr},
                    {"vqc_output_lr", c.agent_cfg.vqc_output_lr},
                    {"encoder_entangler", c.agent_cfg.encoder_entangler},
                    {"replay_capacity", c.agent_cfg.replay_capacity},
                    {"batch_size", c.agent_cfg.batch_size},
                    {"target_sync", c.agent_cfg.target_sync},
                    {"warmup", c.agent_cfg.warmup}};
  j["eps"] = {{"eps_start", c.eps.eps_start}, {"eps_end", c.eps.eps_end}, {"decay", c.eps.decay}};
  return j;
}

RunConfig config_from_echo(const json& j) {
  RunConfig c;
  try {
    c.agent = j.at("agent").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.episodes = j.at("episodes").get<long>();
    c.out_dir = j.at("out_dir").get<std::string>();
    const json& e = j.at("env");
    c.env.gravity = e.at("gravity");
    c.env.dt = e.at("dt");
    c.env.wind_max = e.at("wind_max");
    c.env.turbulence_max = e.at("turbulence_max");
    c.env.main_thrust = e.at("main_thrust");
    c.env.side_thrust = e.at("side_thrust");
    c.env.mass = e.at("mass");
    c.env.inertia = e.at("inertia");
    c.env.side_engine_arm = e.at("side_engine_arm");
    c.env.leg_span = e.at("leg_span");
    c.env.leg_drop = e.at("leg_drop");
    c.env.body_radius = e.at("body_radius");
    c.env.ground_friction = e.at("ground_friction");
    c.env.rest_speed = e.at("rest_speed");
    c.env.rest_omega = e.at("rest_omega");
    c.env.max_steps = e.at("max_steps");
    c.env.x_limit = e.at("x_limit");
    c.env.init_x_range = e.at("init_x_range");
    c.env.init_y = e.at("init_y");
    c.env.init_vx_range = e.at("init_vx_range");
    c.env.init_vy_low = e.at("init_vy_low");
    c.env.init_angle_range = e.at("init_angle_range");
    c.env.init_omega_range = e.at("init_omega_range");
    const json& r = j.at("reward");
    c.reward.xi = r.at("xi");
    c.reward.mu = r.at("mu");
    c.reward.chi = r.at("chi");
    c.reward.kappa_land = r.at("kappa_land");
    c.reward.kappa_crash = r.at("kappa_crash");
    const json& a = j.at("agent_cfg");
    c.agent_cfg.gamma = a.at("gamma");
    c.agent_cfg.lr = a.at("lr");
    c.agent_cfg.hidden_layers = a.at("hidden_layers");
    c.agent_cfg.width = a.at("width");
    c.agent_cfg.vqc_depth = a.at("vqc_depth");
    c.agent_cfg.ac_entropy = a.at("ac_entropy");
    c.agent_cfg.ac_rollout = a.at("ac_rollout");
    c.agent_cfg.vqc_lr = a.at("vqc_lr");
    c.agent_cfg.vqc_output_lr = a.at("vqc_output_lr");
    c.agent_cfg.encoder_entangler = a.at("encoder_entangler");
    c.agent_cfg.replay_capacity = a.at("replay_capacity");
    c.agent_cfg.batch_size = a.at("batch_size");
    c.agent_cfg.target_sync = a.at("target_sync");
    c.agent_cfg.warmup = a.at("warmup");
    const json& p = j.at("eps");
    c.eps.eps_start = p.at("eps_start");
    c.eps.eps_end = p.at("eps_end");
    c.eps.decay = p.at("decay");
  } catch (const json::exception& ex) {
    throw FormatError(std::string("bad config echo: ") + ex.what());
  }
  return c;
}

}  // namespace qrocket::harness
