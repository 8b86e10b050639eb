#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrocket/agents.hpp"
#include "qrocket/config.hpp"
#include "qrocket/lander.hpp"

namespace qrocket::harness {

struct RunResult {
  std::string episodes_csv;
  std::string losses_csv;
  std::string summary_json;
  std::string checkpoint_json;
  double wall_clock_s = 0.0;
  double final_moving_avg_reward = 0.0;
};

// Executes the episode loop and writes episodes.csv, losses.csv,
// summary.json and checkpoint.json under cfg.out_dir. Metrics are flushed
// per episode, so a killed run still leaves parsable files. Identical
// (config, seed) produce byte-identical CSVs.
RunResult run_training(const RunConfig& cfg);

struct ParamReportRow {
  std::string agent;
  std::size_t count = 0;
  double normalized = 0.0;
  double reference_ratio = 0.0;  // published comparison point, for context
};

// Parameter counts of the three default agents, normalized by the DQN count.
std::vector<ParamReportRow> param_report(const agents::AgentConfig& cfg);
std::string format_param_table(const std::vector<ParamReportRow>& rows);
void write_param_csv(const std::vector<ParamReportRow>& rows, const std::string& path);

struct EvalSummary {
  long episodes = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double landing_rate = 0.0;
};

// Greedy rollout of a trained checkpoint; no learning, no exploration.
EvalSummary evaluate(const std::string& checkpoint_path, long n_episodes,
                     std::uint64_t seed);

// One greedy episode dumped as a trajectory CSV.
void replay(const std::string& checkpoint_path, std::uint64_t seed,
            const std::string& out_csv);

// Loads a checkpoint into a freshly constructed agent (plus its RunConfig).
std::unique_ptr<agents::Agent> load_checkpoint(const std::string& path, RunConfig* cfg_out);

}  // namespace qrocket::harness
