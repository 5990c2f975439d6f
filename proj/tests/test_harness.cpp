#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "haps/baselines.hpp"
#include "haps/checkpoint.hpp"
#include "haps/config.hpp"
#include "haps/errors.hpp"
#include "haps/metrics.hpp"
#include "haps/plot.hpp"
#include "haps/train.hpp"

using namespace haps;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("haps_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_run(const fs::path& out) {
  RunConfig cfg;
  cfg.episodes = 2;
  cfg.eval_every = 1;
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d = parse_config("{}");
  CHECK(d.episodes == 12000);
  CHECK(d.eval_every == 500);
  CHECK(d.ppo.lr == 3e-5);
  CHECK(d.env.reward.c_m == 50.0);

  const RunConfig c = parse_config(R"({"ppo": {"lr": 1e-4}, "run": {"master_seed": 9},
                                       "radio": {"extra_atten_db": {"rain": 2.0}}})");
  CHECK(c.ppo.lr == 1e-4);
  CHECK(c.master_seed == 9);
  CHECK(c.env.radio.extra_atten_db.total_db() == doctest::Approx(2.5));

  CHECK_THROWS_AS(parse_config(R"({"ppo": {"learning_rate": 1e-4}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"radio": {"extra_atten_db": {"fog": 1}}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ppo": {"lr": "fast"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ppo": {"gamma_df": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"eval_every": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ppo": {"advantage": "td"}})"), ConfigError);
  CHECK(parse_config(R"({"ppo": {"advantage": "one_step"}})").ppo.advantage ==
        AdvantageMode::OneStep);
  CHECK_THROWS_AS(load_config("/nonexistent/haps.json"), ConfigError);

  const std::string text = dump_config(c);
  CHECK(dump_config(parse_config(text)) == text);

  RunConfig wider = d;
  wider.net.hidden_width = 64;
  CHECK(policy_fingerprint(wider) != policy_fingerprint(d));
  RunConfig faster = d;
  faster.ppo.lr = 1.0;
  CHECK(policy_fingerprint(faster) == policy_fingerprint(d));
  CHECK(schema_hash() == schema_hash());
  CHECK(to_hex(fnv1a64("")) == "cbf29ce484222325");
  CHECK(to_hex(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("checkpoint round trip") {
  const fs::path dir = scratch("ckpt");
  RunConfig cfg;
  const PolicyParams p = fresh_params(cfg, 31);
  const std::string path = (dir / "p.ckpt").string();
  save_checkpoint(path, p, checkpoint_meta(cfg));
  const PolicyParams q = load_policy(cfg, path);
  CHECK((p.flat().array() == q.flat().array()).all());

  const auto a = evaluate_policy(cfg, p, Scenario::preset(1), 1);
  const auto b = evaluate_policy(cfg, q, Scenario::preset(1), 1);
  CHECK(a.mean_reward == b.mean_reward);

  RunConfig wider = cfg;
  wider.net.hidden_width = 64;
  CHECK_THROWS_AS(load_policy(wider, path), ConfigError);
  CheckpointMeta wrong = checkpoint_meta(cfg);
  wrong.schema = "0000000000000000";
  CHECK_THROWS_AS(load_checkpoint(path, fresh_params(cfg, 0), wrong), ConfigError);

  std::string text = slurp(path);
  text.resize(text.size() / 2);
  std::ofstream(dir / "cut.ckpt") << text;
  CHECK_THROWS_AS(load_policy(cfg, (dir / "cut.ckpt").string()), ConfigError);
  CHECK_THROWS_AS(load_policy(cfg, (dir / "missing.ckpt").string()), ConfigError);
}

TEST_CASE("metrics rows round trip") {
  MetricsRow r;
  r.episode = 17;
  r.phase = "eval";
  r.scenario = "3";
  r.mean_reward = 0.123456789;
  r.mean_fair_rate = 41.5;
  r.mean_sum_throughput_mbps = 1000.25;
  r.haps_distance_m = {1.5, 20.0, 300.125};
  r.wind_speed_mean = 4.5;
  r.wind_speed_max = 9.0;
  const std::string line = format_metrics_row(r);
  const MetricsRow back = parse_metrics_row(line, 3);
  CHECK(back.episode == 17);
  CHECK(back.phase == "eval");
  CHECK(back.scenario == "3");
  CHECK(back.mean_reward == r.mean_reward);
  CHECK(back.haps_distance_m == r.haps_distance_m);
  CHECK(format_metrics_row(back) == line);
  CHECK_THROWS_AS(parse_metrics_row(line, 2), ConfigError);
  CHECK_THROWS_AS(parse_metrics_row("1,train,random,x,1,1,1,1,1,1,1", 3), ConfigError);

  std::string header = metrics_header(3);
  CHECK(header.rfind("episode,phase,scenario,mean_reward", 0) == 0);
  CHECK(header.find("haps3_distance_m") != std::string::npos);

  const fs::path dir = scratch("metrics");
  {
    MetricsWriter w((dir / "m.csv").string(), 3);
    w.append(r);
    r.phase = "train";
    w.append(r);
  }
  const auto rows = read_metrics((dir / "m.csv").string());
  CHECK(rows.size() == 2);
  CHECK(rows[1].phase == "train");
}

TEST_CASE("training writes the expected rows and is deterministic") {
  const fs::path a = scratch("train_a");
  const fs::path b = scratch("train_b");
  const TrainResult ra = train(small_run(a));
  train(small_run(b));
  const auto rows = read_metrics(ra.metrics_path);
  int train_rows = 0, eval_rows = 0;
  for (const auto& r : rows) (r.phase == "train" ? train_rows : eval_rows)++;
  CHECK(train_rows == 2);
  CHECK(eval_rows == 8);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  CHECK(slurp(a / "final.ckpt") == slurp(b / "final.ckpt"));
  CHECK(fs::exists(a / "best.ckpt"));
  CHECK(fs::exists(a / "config.json"));
  CHECK(ra.train_rewards.size() == 2);

  RunConfig bad = small_run(a / "metrics.csv" / "sub");
  CHECK_THROWS_AS(train(bad), ConfigError);
}

TEST_CASE("evaluation contract") {
  RunConfig cfg;
  const PolicyParams p = fresh_params(cfg, 3);
  CHECK_THROWS_AS(evaluate_policy(cfg, p, Scenario::preset(1), 0), ConfigError);
  const auto e = evaluate_policy(cfg, p, Scenario::preset(2), 2);
  CHECK(e.runs.size() == 2);
  CHECK(e.episodes == 2);
  CHECK(e.mean_reward > 0.0);
  // Paired seeds: the same index sees the same realisation.
  CHECK(eval_episode_seed(1, 2, 0) == eval_episode_seed(1, 2, 0));
  CHECK(eval_episode_seed(1, 2, 0) != eval_episode_seed(1, 2, 1));
  CHECK(eval_episode_seed(1, 2, 0) != eval_episode_seed(1, 3, 0));
}

TEST_CASE("baselines") {
  CHECK(parse_baseline("oracle") == Baseline::Oracle);
  CHECK(std::string(baseline_name(Baseline::NoControl)) == "nocontrol");
  CHECK_THROWS_AS(parse_baseline("greedy"), std::invalid_argument);

  const Action c = command_towards(Vec2(30.0, 40.0), 50.0);
  CHECK(c.angle == doctest::Approx(std::atan2(40.0, 30.0)));
  CHECK(c.distance == doctest::Approx(50.0));
  CHECK(command_towards(Vec2(300.0, 0.0), 50.0).distance == 50.0);
  CHECK(command_towards(Vec2(-3.0, 0.0), 50.0).angle == -kPi);

  SUBCASE("static equals nocontrol without wind") {
    RunConfig cfg;
    cfg.env.wind.mean_speed = 0.0;
    cfg.env.wind.residual_std = 0.0;
    cfg.env.wind.slow_amplitude = 0.0;
    HapsEnv a(cfg.env), b(cfg.env);
    const auto sa = run_episode(a, Scenario::preset(1), 5, make_baseline(Baseline::Static, 1));
    const auto sb = run_episode(b, Scenario::preset(1), 5, make_baseline(Baseline::NoControl, 1));
    CHECK(sa.rewards == sb.rewards);
    CHECK(a.world().haps_xy == b.world().haps_xy);
  }

  SUBCASE("oracle stays within r_max of its hotspot") {
    RunConfig cfg;
    HapsEnv env(cfg.env);
    Observation obs = env.reset(Scenario::custom(hotspot_starts(cfg.env.area)), 8);
    const Controller oracle = make_baseline(Baseline::Oracle, 1);
    double worst = 0.0;
    while (!env.done()) {
      const StepResult r = env.step(oracle(env, obs));
      obs = r.observation;
      for (double d : r.info.haps_to_hotspot_m) worst = std::max(worst, d);
    }
    CHECK(worst <= cfg.env.r_max);
  }

  SUBCASE("random varies more than static") {
    // Spread of episode rewards across 50 paired episodes. Scenario 1 is
    // left out: its spread-out start makes the static reward swing with the
    // hotspot crossings.
    RunConfig cfg;
    for (int id = 2; id <= 4; ++id) {
      const auto s = evaluate_baseline(cfg, Baseline::Static, Scenario::preset(id), 50);
      const auto r = evaluate_baseline(cfg, Baseline::Random, Scenario::preset(id), 50);
      CHECK(r.std_reward > s.std_reward);
    }
  }

  SUBCASE("oracle beats nocontrol on every scenario") {
    RunConfig cfg;
    for (int id = 1; id <= 4; ++id) {
      const auto o = evaluate_baseline(cfg, Baseline::Oracle, Scenario::preset(id), 2);
      const auto n = evaluate_baseline(cfg, Baseline::NoControl, Scenario::preset(id), 2);
      CHECK(o.mean_reward > n.mean_reward);
    }
  }
}

TEST_CASE("plots") {
  const std::vector<double> xs{1.0, 4.0, 2.0, 8.0};
  CHECK(moving_average(xs, 1) == xs);
  const auto m2 = moving_average(xs, 2);
  CHECK(m2[0] == 1.0);
  CHECK(m2[1] == 2.5);
  CHECK(m2[3] == 5.0);
  CHECK(moving_average({}, 3).empty());

  std::vector<MetricsRow> rows(2);
  rows[0].episode = 1;
  rows[0].phase = "train";
  rows[0].scenario = "random";
  rows[0].haps_distance_m = {0, 0, 0};
  rows[1] = rows[0];
  rows[1].episode = 2;
  rows[1].mean_reward = 0.5;
  const fs::path a = scratch("plot_a");
  const fs::path b = scratch("plot_b");
  const auto files = plot_metrics(rows, a.string(), 50);
  plot_metrics(rows, b.string(), 50);
  CHECK(files.size() == 4);
  for (const auto& f : files) {
    const fs::path name = fs::path(f).filename();
    const std::string svg = slurp(a / name);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg == slurp(b / name));
  }
  CHECK_THROWS_AS(plot_metrics({}, a.string(), 5), ConfigError);
}
