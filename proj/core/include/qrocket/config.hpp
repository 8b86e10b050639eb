#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qrocket/agents.hpp"
#include "qrocket/lander.hpp"

namespace qrocket::harness {

// Everything a training run depends on. Echoed verbatim into every artifact
// file so results carry their own provenance.
struct RunConfig {
  std::string agent = "dqn";
  std::uint64_t seed = 1;
  long episodes = 10000;
  std::string out_dir = "out";
  env::EnvConfig env;
  env::RewardConfig reward;
  agents::AgentConfig agent_cfg;
  agents::EpsilonSchedule eps;
};

// Applies one key/value pair (TOML keys and CLI flag names coincide).
// Throws ConfigError on unknown keys or unparsable values.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat TOML subset: key = value lines, '#' comments, [section] headers are
// accepted and ignored. Throws IoError if unreadable, ConfigError on bad
// syntax or unknown keys.
void load_toml_into(RunConfig& cfg, const std::string& path);

nlohmann::json config_echo(const RunConfig& cfg);
RunConfig config_from_echo(const nlohmann::json& j);  // throws FormatError

}  // namespace qrocket::harness
