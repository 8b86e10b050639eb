#include "qrocket/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qrocket/errors.hpp"

namespace qrocket::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t episode_seed(std::uint64_t run_seed, long episode) {
  return mix_seed(run_seed, 1000003ULL + static_cast<std::uint64_t>(episode));
}

int greedy_action(agents::Agent& agent, const std::array<double, 8>& obs, Rng& rng) {
  return agent.act(obs, 0.0, rng);
}

}  // namespace

RunResult run_training(const RunConfig& cfg) {
  const agents::AgentKind kind = agents::agent_kind_from_string(cfg.agent);
  if (cfg.episodes < 1) throw ConfigError("episodes must be >= 1");

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);

  RunResult result;
  result.episodes_csv = (fs::path(cfg.out_dir) / "episodes.csv").string();
  result.losses_csv = (fs::path(cfg.out_dir) / "losses.csv").string();
  result.summary_json = (fs::path(cfg.out_dir) / "summary.json").string();
  result.checkpoint_json = (fs::path(cfg.out_dir) / "checkpoint.json").string();

  std::ofstream episodes_out(result.episodes_csv, std::ios::binary);
  std::ofstream losses_out(result.losses_csv, std::ios::binary);
  if (!episodes_out || !losses_out) {
    throw IoError("cannot write metrics files under " + cfg.out_dir);
  }
  episodes_out << "episode,total_reward,epsilon,steps,outcome\n";
  losses_out << "update_index,loss\n";
  episodes_out.flush();
  losses_out.flush();

  Rng init_rng(mix_seed(cfg.seed, 0xA6E47ULL));
  Rng act_rng(mix_seed(cfg.seed, 0x5EEDULL));
  auto agent = agents::make_agent(kind, cfg.agent_cfg, init_rng);
  env::LanderEnv lander(cfg.env, cfg.reward);

  const auto t0 = std::chrono::steady_clock::now();
  std::deque<double> window;
  long update_index = 0;

  for (long ep = 0; ep < cfg.episodes; ++ep) {
    const double epsilon = cfg.eps.at(ep);
    env::LanderState s = lander.reset(episode_seed(cfg.seed, ep));
    double total_reward = 0.0;
    int steps = 0;
    env::Outcome outcome = env::Outcome::flying;

    while (!lander.done()) {
      const auto obs = s.as_obs();
      const int a = agent->act(obs, epsilon, act_rng);
      const env::StepResult r = lander.step(static_cast<env::Action>(a));
      agent->observe({obs, a, r.reward, r.next_state.as_obs(), r.done});
      if (auto loss = agent->train(act_rng)) {
        losses_out << update_index << ',' << fmt17(*loss) << '\n';
        ++update_index;
      }
      total_reward += r.reward;
      s = r.next_state;
      outcome = r.outcome;
      ++steps;
    }

    episodes_out << ep << ',' << fmt17(total_reward) << ',' << fmt17(epsilon) << ','
                 << steps << ',' << env::outcome_name(outcome) << '\n';
    episodes_out.flush();
    losses_out.flush();

    window.push_back(total_reward);
    if (window.size() > 100) window.pop_front();
  }

  const auto t1 = std::chrono::steady_clock::now();
  result.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();
  double ma = 0.0;
  for (double r : window) ma += r;
  result.final_moving_avg_reward = window.empty() ? 0.0 : ma / window.size();

  json checkpoint;
  checkpoint["agent_kind"] = agent->kind();
  checkpoint["config"] = config_echo(cfg);
  checkpoint["episode"] = cfg.episodes;
  checkpoint["rng_state"] = act_rng.serialize();
  checkpoint["agent"] = agent->checkpoint();
  {
    std::ofstream out(result.checkpoint_json, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + result.checkpoint_json);
    out << checkpoint.dump(2) << '\n';
  }

  json summary;
  summary["agent"] = cfg.agent;
  summary["param_count"] = agent->count_params();
  summary["wall_clock_s"] = result.wall_clock_s;
  summary["final_moving_avg_reward"] = result.final_moving_avg_reward;
  summary["episodes"] = cfg.episodes;
  summary["config"] = config_echo(cfg);
  {
    std::ofstream out(result.summary_json, std::ios::binary);
    if (!out) throw IoError("cannot write summary: " + result.summary_json);
    out << summary.dump(2) << '\n';
  }
  return result;
}

std::vector<ParamReportRow> param_report(const agents::AgentConfig& cfg) {
  Rng rng(0);
  std::vector<ParamReportRow> rows(3);
  rows[0].agent = "qrl";
  rows[0].count = agents::QrlAgent(cfg, rng).count_params();
  rows[0].reference_ratio = 0.233;
  rows[1].agent = "dqn";
  rows[1].count = agents::DqnAgent(cfg, rng).count_params();
  rows[1].reference_ratio = 1.0;
  rows[2].agent = "ac";
  rows[2].count = agents::ActorCriticAgent(cfg, rng).count_params();
  rows[2].reference_ratio = 0.879;

  const double dqn = static_cast<double>(rows[1].count);
  for (auto& r : rows) r.normalized = static_cast<double>(r.count) / dqn;
  return rows;
}

std::string format_param_table(const std::vector<ParamReportRow>& rows) {
  std::ostringstream os;
  os << "agent        params   normalized   reference\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-10s %8zu   %10.5f   %9.3f\n", r.agent.c_str(),
                  r.count, r.normalized, r.reference_ratio);
    os << buf;
  }
  return os.str();
}

void write_param_csv(const std::vector<ParamReportRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write param report: " + path);
  out << "agent,params,normalized,reference_ratio\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g\n", r.agent.c_str(), r.count,
                  r.normalized, r.reference_ratio);
    out << buf;
  }
}

std::unique_ptr<agents::Agent> load_checkpoint(const std::string& path, RunConfig* cfg_out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg = config_from_echo(j.at("config"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint: ") + e.what());
  }
  const auto kind = agents::agent_kind_from_string(cfg.agent);
  Rng init_rng(mix_seed(cfg.seed, 0xA6E47ULL));
  auto agent = agents::make_agent(kind, cfg.agent_cfg, init_rng);
  if (!j.contains("agent")) throw FormatError("checkpoint missing agent section");
  agent->restore(j.at("agent"));
  if (cfg_out) *cfg_out = cfg;
  return agent;
}

EvalSummary evaluate(const std::string& checkpoint_path, long n_episodes,
                     std::uint64_t seed) {
  if (n_episodes < 1) throw ConfigError("evaluate needs at least one episode");
  RunConfig cfg;
  auto agent = load_checkpoint(checkpoint_path, &cfg);
  env::LanderEnv lander(cfg.env, cfg.reward);

  Rng act_rng(mix_seed(seed, 0xE7A1ULL));
  EvalSummary summary;
  summary.episodes = n_episodes;
  std::vector<double> rewards;
  long landed = 0;
  for (long ep = 0; ep < n_episodes; ++ep) {
    env::LanderState s = lander.reset(episode_seed(seed, ep));
    double total = 0.0;
    env::Outcome outcome = env::Outcome::flying;
    while (!lander.done()) {
      const int a = greedy_action(*agent, s.as_obs(), act_rng);
      const env::StepResult r = lander.step(static_cast<env::Action>(a));
      total += r.reward;
      s = r.next_state;
      outcome = r.outcome;
    }
    rewards.push_back(total);
    if (outcome == env::Outcome::landed) ++landed;
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= rewards.size();
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  summary.mean_reward = mean;
  summary.std_reward = std::sqrt(var / rewards.size());
  summary.landing_rate = static_cast<double>(landed) / n_episodes;
  return summary;
}

void replay(const std::string& checkpoint_path, std::uint64_t seed,
            const std::string& out_csv) {
  RunConfig cfg;
  auto agent = load_checkpoint(checkpoint_path, &cfg);
  env::LanderEnv lander(cfg.env, cfg.reward);

  std::ofstream out(out_csv, std::ios::binary);
  if (!out) throw IoError("cannot write trajectory: " + out_csv);
  env::write_trajectory_header(out);

  Rng act_rng(mix_seed(seed, 0xE7A1ULL));
  env::LanderState s = lander.reset(episode_seed(seed, 0));
  int t = 0;
  while (!lander.done()) {
    const int a = greedy_action(*agent, s.as_obs(), act_rng);
    const env::StepResult r = lander.step(static_cast<env::Action>(a));
    env::write_trajectory_row(out, t, r.next_state, static_cast<env::Action>(a), r.reward,
                              r.done, r.outcome);
    s = r.next_state;
    ++t;
  }
}

}  // namespace qrocket::harness
