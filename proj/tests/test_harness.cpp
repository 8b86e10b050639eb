#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "qrocket/config.hpp"
#include "qrocket/errors.hpp"
#include "qrocket/harness.hpp"
#include "qrocket/plot.hpp"

using namespace qrocket;
using namespace qrocket::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("qrocket_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << content;
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

long count_occurrences(const std::string& text, const std::string& needle) {
  long n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

RunConfig tiny_run(const std::string& agent, const fs::path& out) {
  RunConfig cfg;
  cfg.agent = agent;
  cfg.seed = 11;
  cfg.episodes = 2;
  cfg.out_dir = out.string();
  cfg.env.wind_max = 0.0;
  cfg.env.turbulence_max = 0.0;
  cfg.env.max_steps = 120;
  cfg.agent_cfg.warmup = 40;
  cfg.agent_cfg.batch_size = 8;
  cfg.agent_cfg.vqc_depth = 1;
  return cfg;
}
}  // namespace

TEST_CASE("apply_key_value covers typed fields and rejects junk") {
  RunConfig cfg;
  apply_key_value(cfg, "agent", "qrl");
  apply_key_value(cfg, "seed", "42");
  apply_key_value(cfg, "episodes", "123");
  apply_key_value(cfg, "gravity", "3.5");
  apply_key_value(cfg, "eps_decay", "0.5");
  apply_key_value(cfg, "encoder_entangler", "false");
  CHECK(cfg.agent == "qrl");
  CHECK(cfg.seed == 42);
  CHECK(cfg.episodes == 123);
  CHECK(cfg.env.gravity == 3.5);
  CHECK(cfg.eps.decay == 0.5);
  CHECK_FALSE(cfg.agent_cfg.encoder_entangler);

  CHECK_THROWS_AS(apply_key_value(cfg, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(cfg, "gravity", "strong"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(cfg, "episodes", "many"), ConfigError);
}

TEST_CASE("TOML subset loads keys, comments and sections") {
  const auto dir = temp_dir("toml");
  const auto file = dir / "run.toml";
  write_file(file,
             "# experiment configuration\n"
             "[run]\n"
             "agent = \"dqn\"\n"
             "seed = 7\n"
             "\n"
             "[env]\n"
             "gravity = 9.8   # lighter planet\n"
             "wind_max = 0\n");
  RunConfig cfg;
  load_toml_into(cfg, file.string());
  CHECK(cfg.agent == "dqn");
  CHECK(cfg.seed == 7);
  CHECK(cfg.env.gravity == 9.8);
  CHECK(cfg.env.wind_max == 0.0);

  CHECK_THROWS_AS(load_toml_into(cfg, (dir / "missing.toml").string()), IoError);

  const auto bad = dir / "bad.toml";
  write_file(bad, "gravity\n");
  CHECK_THROWS_AS(load_toml_into(cfg, bad.string()), ConfigError);
}

TEST_CASE("config echo round-trips through JSON") {
  RunConfig cfg;
  cfg.agent = "ac";
  cfg.seed = 99;
  cfg.env.gravity = 8.0;
  cfg.reward.xi = 50.0;
  cfg.agent_cfg.vqc_depth = 3;
  cfg.eps.decay = 0.99;
  const auto j = config_echo(cfg);
  const RunConfig back = config_from_echo(j);
  CHECK(back.agent == "ac");
  CHECK(back.seed == 99);
  CHECK(back.env.gravity == 8.0);
  CHECK(back.reward.xi == 50.0);
  CHECK(back.agent_cfg.vqc_depth == 3);
  CHECK(back.eps.decay == 0.99);

  CHECK_THROWS_AS(config_from_echo(nlohmann::json{{"nope", 1}}), FormatError);
}

TEST_CASE("one-episode run produces exactly one metrics row") {
  const auto dir = temp_dir("one_ep");
  auto cfg = tiny_run("dqn", dir);
  cfg.episodes = 1;
  const auto result = run_training(cfg);
  const std::string episodes = slurp(result.episodes_csv);
  CHECK(count_lines(episodes) == 2);  // header + one row
  CHECK(episodes.rfind("episode,total_reward,epsilon,steps,outcome\n", 0) == 0);
}

TEST_CASE("identical config and seed give byte-identical metrics") {
  for (const std::string agent : {"dqn", "qrl", "ac"}) {
    const auto dir = temp_dir("rep_" + agent);
    const auto r1 = run_training(tiny_run(agent, dir));
    const std::string episodes = slurp(r1.episodes_csv);
    const std::string losses = slurp(r1.losses_csv);
    const std::string checkpoint = slurp(r1.checkpoint_json);
    const auto r2 = run_training(tiny_run(agent, dir));
    CHECK(episodes == slurp(r2.episodes_csv));
    CHECK(losses == slurp(r2.losses_csv));
    CHECK(checkpoint == slurp(r2.checkpoint_json));
  }
}

TEST_CASE("param_report pins the published counts and ordering") {
  const auto rows = param_report(agents::AgentConfig{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].agent == "qrl");
  CHECK(rows[0].count == 64);
  CHECK(rows[1].agent == "dqn");
  CHECK(rows[1].count == 9156);
  CHECK(rows[1].normalized == 1.0);
  CHECK(rows[2].agent == "ac");
  CHECK(rows[0].count < rows[2].count);
  CHECK(rows[2].count < rows[1].count);
  CHECK(rows[0].normalized == doctest::Approx(64.0 / 9156.0));
  // Reference ratios from the comparison table this report mirrors.
  CHECK(rows[0].reference_ratio == 0.233);
  CHECK(rows[2].reference_ratio == 0.879);

  const auto table = format_param_table(rows);
  CHECK(table.find("qrl") != std::string::npos);
  CHECK(table.find("9156") != std::string::npos);
}

TEST_CASE("checkpoints restore and evaluate deterministically") {
  const auto dir = temp_dir("ckpt");
  const auto result = run_training(tiny_run("dqn", dir));

  RunConfig loaded_cfg;
  auto agent = load_checkpoint(result.checkpoint_json, &loaded_cfg);
  CHECK(agent->kind() == "dqn");
  CHECK(loaded_cfg.env.max_steps == 120);

  const auto s1 = evaluate(result.checkpoint_json, 3, 5);
  const auto s2 = evaluate(result.checkpoint_json, 3, 5);
  CHECK(s1.episodes == 3);
  CHECK(s1.mean_reward == s2.mean_reward);
  CHECK(s1.std_reward == s2.std_reward);
  CHECK(s1.landing_rate >= 0.0);
  CHECK(s1.landing_rate <= 1.0);

  const auto corrupt = dir / "corrupt.json";
  write_file(corrupt, "{ not json");
  CHECK_THROWS_AS(evaluate(corrupt.string(), 1, 1), FormatError);
  CHECK_THROWS_AS(evaluate((dir / "absent.json").string(), 1, 1), IoError);
}

TEST_CASE("replay writes a parsable trajectory") {
  const auto dir = temp_dir("replay");
  const auto result = run_training(tiny_run("qrl", dir));
  const auto traj = dir / "traj.csv";
  replay(result.checkpoint_json, 3, traj.string());
  const std::string text = slurp(traj.string());
  CHECK(text.rfind("t,x,y,vx,vy,theta,omega,dl,dr,action,reward,done,outcome\n", 0) == 0);
  CHECK(count_lines(text) >= 2);
}

TEST_CASE("metrics reader detects both schemas and flags bad input") {
  const auto dir = temp_dir("csv");
  const auto ep = dir / "run_a.csv";
  write_file(ep,
             "episode,total_reward,epsilon,steps,outcome\n"
             "0,-12.5,1,100,timeout\n"
             "1,3.25,0.999,80,landed\n");
  std::string schema;
  const Series s = read_metrics_csv(ep.string(), &schema);
  CHECK(schema == "episodes");
  CHECK(s.name == "run_a");
  REQUIRE(s.x.size() == 2);
  CHECK(s.y[0] == -12.5);
  CHECK(s.y[1] == 3.25);

  const auto lo = dir / "losses.csv";
  write_file(lo, "update_index,loss\n0,1.5\n");
  read_metrics_csv(lo.string(), &schema);
  CHECK(schema == "losses");

  const auto empty = dir / "empty.csv";
  write_file(empty, "episode,total_reward,epsilon,steps,outcome\n");
  CHECK_THROWS_AS(read_metrics_csv(empty.string(), nullptr), FormatError);

  const auto bad = dir / "bad.csv";
  write_file(bad, "episode,total_reward,epsilon,steps,outcome\n0,oops,1,5,flying\n");
  CHECK_THROWS_WITH_AS(read_metrics_csv(bad.string(), nullptr),
                       doctest::Contains(":2:"), FormatError);
}

TEST_CASE("charts carry one raw polyline per short series plus legends") {
  Series s;
  s.name = "short";
  for (int i = 0; i < 10; ++i) {
    s.x.push_back(i);
    s.y.push_back(i * i);
  }
  const std::string svg = render_chart_svg("t", "x", "y", {s}, 100);
  CHECK(count_occurrences(svg, "<polyline") == 1);  // too short for the overlay
  CHECK(svg.find(">short</text>") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 960 540\"") != std::string::npos);

  // 120 points fills the window-100 overlay: two polylines for one series.
  Series l;
  l.name = "long";
  for (int i = 0; i < 120; ++i) {
    l.x.push_back(i);
    l.y.push_back(std::sin(i * 0.1));
  }
  const std::string svg2 = render_chart_svg("t", "x", "y", {l}, 100);
  CHECK(count_occurrences(svg2, "<polyline") == 2);

  CHECK_THROWS_AS(render_chart_svg("t", "x", "y", {}, 100), FormatError);
}

TEST_CASE("emit_plots writes charts and the comparison table") {
  const auto dir = temp_dir("plots");
  std::vector<std::string> files;
  for (const std::string name : {"alpha", "beta", "gamma"}) {
    const auto f = dir / (name + ".csv");
    std::ostringstream body;
    body << "episode,total_reward,epsilon,steps,outcome\n";
    for (int i = 0; i < 5; ++i) body << i << ',' << i * 2 << ",1," << 10 << ",timeout\n";
    write_file(f, body.str());
    files.push_back(f.string());
  }
  const auto out = dir / "charts";
  emit_plots(files, out.string());

  const std::string svg = slurp((out / "reward.svg").string());
  CHECK(count_occurrences(svg, "<polyline") == 3);
  for (const std::string name : {"alpha", "beta", "gamma"}) {
    CHECK(svg.find(">" + name + "</text>") != std::string::npos);
  }

  const std::string table = slurp((out / "comparison.csv").string());
  CHECK(table.rfind("series,episodes,mean_first_100,mean_final_100,improvement,best_reward\n",
                    0) == 0);
  CHECK(count_lines(table) == 4);

  // Empty/bad inputs fail without leaving partial chart files behind.
  const auto out2 = dir / "charts2";
  const auto empty = dir / "hollow.csv";
  write_file(empty, "episode,total_reward,epsilon,steps,outcome\n");
  CHECK_THROWS_AS(emit_plots({empty.string()}, out2.string()), FormatError);
  CHECK_FALSE(fs::exists(out2 / "reward.svg"));
}

TEST_CASE("summary JSON echoes the full configuration") {
  const auto dir = temp_dir("summary");
  auto cfg = tiny_run("ac", dir);
  const auto result = run_training(cfg);
  const auto j = nlohmann::json::parse(slurp(result.summary_json));
  CHECK(j.at("agent") == "ac");
  CHECK(j.at("episodes") == 2);
  CHECK(j.at("param_count").get<std::size_t>() > 0);
  CHECK(j.at("config").at("env").at("max_steps") == 120);
}
