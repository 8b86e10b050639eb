// Command-line front end: train / evaluate / replay / params / plot.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 format error.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qrocket/errors.hpp"
#include "qrocket/harness.hpp"
#include "qrocket/plot.hpp"

namespace fs = std::filesystem;
using namespace qrocket;

namespace {

// Flag definitions mirror the RunConfig keys; values are applied through the
// same setter used for TOML files, so the two sources cannot drift apart.
struct FlagStore {
  std::vector<std::pair<std::string, std::string>> values;
};

void add_config_flags(CLI::App* cmd, FlagStore& store) {
  static const char* keys[] = {
      "agent", "seed", "episodes", "out_dir", "gravity", "dt", "wind_max",
      "turbulence_max", "main_thrust", "side_thrust", "mass", "inertia",
      "side_engine_arm", "leg_span", "leg_drop", "body_radius", "ground_friction",
      "rest_speed", "rest_omega", "max_steps", "x_limit", "init_x_range", "init_y",
      "init_vx_range", "init_vy_low", "init_angle_range", "init_omega_range", "xi", "mu",
      "chi", "kappa_land", "kappa_crash", "gamma", "lr", "hidden_layers", "width",
      "vqc_depth", "vqc_lr", "vqc_output_lr", "ac_entropy", "ac_rollout", "encoder_entangler", "replay_capacity", "batch_size",
      "target_sync", "warmup", "eps_start", "eps_end", "eps_decay"};
  for (const char* key : keys) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        "--" + k,
        [&store, k](const std::string& v) { store.values.emplace_back(k, v); },
        "config key '" + k + "'");
  }
}

harness::RunConfig build_config(const std::string& config_file, const FlagStore& store) {
  harness::RunConfig cfg;
  if (!config_file.empty()) harness::load_toml_into(cfg, config_file);
  for (const auto& [k, v] : store.values) harness::apply_key_value(cfg, k, v);
  return cfg;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("bad seed list entry: " + item);
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

int run(int argc, char** argv) {
  CLI::App app{"Quantum and classical reinforcement learning for rocket landing"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Run a training experiment");
  std::string train_config_file, seeds_csv;
  train->add_option("--config", train_config_file, "TOML config file");
  train->add_option("--seeds", seeds_csv, "comma-separated seeds; one run per seed");
  FlagStore train_flags;
  add_config_flags(train, train_flags);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Greedy evaluation of a checkpoint");
  std::string eval_checkpoint;
  long eval_episodes = 100;
  std::uint64_t eval_seed = 1;
  eval->add_option("checkpoint", eval_checkpoint, "checkpoint.json path")->required();
  eval->add_option("--episodes", eval_episodes, "number of evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Dump one greedy trajectory as CSV");
  std::string replay_checkpoint, replay_out = "trajectory.csv";
  std::uint64_t replay_seed = 1;
  replay_cmd->add_option("checkpoint", replay_checkpoint, "checkpoint.json path")->required();
  replay_cmd->add_option("--seed", replay_seed, "episode seed");
  replay_cmd->add_option("--out", replay_out, "output CSV path");

  // params
  auto* params = app.add_subcommand("params", "Parameter-count report");
  std::string params_config_file, params_csv;
  params->add_option("--config", params_config_file, "TOML config file");
  params->add_option("--csv", params_csv, "also write the report as CSV");
  FlagStore params_flags;
  add_config_flags(params, params_flags);

  // plot
  auto* plot = app.add_subcommand("plot", "Render SVG charts from metrics CSVs");
  std::vector<std::string> plot_files;
  std::string plot_out = ".";
  plot->add_option("files", plot_files, "metrics CSV files")->required();
  plot->add_option("--out-dir", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (train->parsed()) {
    harness::RunConfig cfg = build_config(train_config_file, train_flags);
    if (seeds_csv.empty()) {
      const auto result = harness::run_training(cfg);
      std::cout << "wrote " << result.episodes_csv << "\n"
                << "final 100-episode mean reward: " << result.final_moving_avg_reward
                << " (" << result.wall_clock_s << " s)\n";
    } else {
      // Independent runs, one output subdirectory per seed.
      const auto seeds = parse_seed_list(seeds_csv);
      std::vector<std::thread> workers;
      std::vector<std::string> errors(seeds.size());
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        harness::RunConfig sub = cfg;
        sub.seed = seeds[i];
        sub.out_dir = (fs::path(cfg.out_dir) / ("seed_" + std::to_string(seeds[i]))).string();
        workers.emplace_back([sub, i, &errors] {
          try {
            harness::run_training(sub);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!errors[i].empty()) throw IoError("seed " + std::to_string(seeds[i]) + ": " + errors[i]);
        std::cout << "seed " << seeds[i] << ": done\n";
      }
    }
    return 0;
  }

  if (eval->parsed()) {
    const auto s = harness::evaluate(eval_checkpoint, eval_episodes, eval_seed);
    nlohmann::json j{{"episodes", s.episodes},
                     {"mean_reward", s.mean_reward},
                     {"std_reward", s.std_reward},
                     {"landing_rate", s.landing_rate}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (replay_cmd->parsed()) {
    harness::replay(replay_checkpoint, replay_seed, replay_out);
    std::cout << "wrote " << replay_out << "\n";
    return 0;
  }

  if (params->parsed()) {
    harness::RunConfig cfg = build_config(params_config_file, params_flags);
    const auto rows = harness::param_report(cfg.agent_cfg);
    std::cout << harness::format_param_table(rows);
    if (!params_csv.empty()) harness::write_param_csv(rows, params_csv);
    return 0;
  }

  if (plot->parsed()) {
    harness::emit_plots(plot_files, plot_out);
    std::cout << "wrote charts to " << plot_out << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
