// Command-line front end: train, eval, baseline, plot, check.
//
// Exit codes: 0 success, 1 configuration/input error, 2 numerical abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "haps/baselines.hpp"
#include "haps/check.hpp"
#include "haps/config.hpp"
#include "haps/errors.hpp"
#include "haps/metrics.hpp"
#include "haps/plot.hpp"
#include "haps/train.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> out;
  std::string scenario = "1";
};

haps::RunConfig resolve(const CommonOptions& o) {
  haps::RunConfig cfg = o.config_path.empty() ? haps::RunConfig{} : haps::load_config(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  cfg.validate();
  return cfg;
}

haps::Scenario scenario_of(const CommonOptions& o) {
  try {
    return haps::Scenario::parse(o.scenario);
  } catch (const std::invalid_argument& e) {
    throw haps::ConfigError(e.what());
  }
}

void print_summary(const char* what, const haps::EvalSummary& e) {
  std::printf("%s scenario=%s episodes=%d reward=%.6f+-%.6f throughput_mbps=%.3f+-%.3f fair_rate=%.4f\n",
              what, e.scenario.c_str(), e.episodes, e.mean_reward, e.std_reward,
              e.mean_throughput_mbps, e.std_throughput_mbps, e.mean_fair_rate);
}

void write_trace_file(const haps::RunConfig& cfg, const haps::Scenario& scenario,
                      const haps::Controller& controller, const std::string& path) {
  haps::HapsEnv env(cfg.env);
  env.set_trace(true);
  haps::run_episode(env, scenario, haps::eval_episode_seed(cfg.master_seed, scenario.id(), 0),
                    controller);
  std::ofstream out(path);
  if (!out) throw haps::ConfigError("cannot write trace " + path);
  haps::write_trace(out, env.trace());
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_scenario) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "master seed override");
  cmd->add_option("--episodes", o.episodes, "episode count override");
  cmd->add_option("--out", o.out, "output directory override");
  if (with_scenario) cmd->add_option("--scenario", o.scenario, "1..4 or random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HAPS positioning simulator and PPO trainer"};
  app.require_subcommand(1);

  CommonOptions train_opt, eval_opt, base_opt;
  auto* train_cmd = app.add_subcommand("train", "train a policy");
  add_common(train_cmd, train_opt, false);

  std::string checkpoint, eval_trace;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint with exploration off");
  add_common(eval_cmd, eval_opt, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--trace", eval_trace, "write the first episode's per-frame trace");

  std::string baseline_name, base_trace;
  auto* base_cmd = app.add_subcommand("baseline", "run a non-learned comparator");
  add_common(base_cmd, base_opt, true);
  base_cmd->add_option("name", baseline_name, "static|nocontrol|oracle|random")->required();
  base_cmd->add_option("--trace", base_trace, "write the first episode's per-frame trace");

  std::string metrics_path, plot_out = ".";
  int window = 50;
  auto* plot_cmd = app.add_subcommand("plot", "render metrics as SVG charts");
  plot_cmd->add_option("metrics", metrics_path, "metrics.csv")->required();
  plot_cmd->add_option("--out", plot_out, "output directory");
  plot_cmd->add_option("--window", window, "moving-average window")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "run the invariant self-test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) {
      haps::RunConfig cfg = resolve(train_opt);
      if (train_opt.episodes) cfg.episodes = *train_opt.episodes;
      cfg.validate();
      const auto result = haps::train(cfg, &std::cerr);
      std::printf("metrics %s\nfinal %s\nbest %s\n", result.metrics_path.c_str(),
                  result.final_checkpoint.c_str(), result.best_checkpoint.c_str());
    } else if (*eval_cmd) {
      const haps::RunConfig cfg = resolve(eval_opt);
      const haps::Scenario scenario = scenario_of(eval_opt);
      const auto params = haps::load_policy(cfg, checkpoint);
      const int episodes = eval_opt.episodes.value_or(20);
      print_summary("eval", haps::evaluate_policy(cfg, params, scenario, episodes));
      if (!eval_trace.empty())
        write_trace_file(cfg, scenario, haps::policy_controller(params), eval_trace);
    } else if (*base_cmd) {
      const haps::RunConfig cfg = resolve(base_opt);
      const haps::Scenario scenario = scenario_of(base_opt);
      haps::Baseline b;
      try {
        b = haps::parse_baseline(baseline_name);
      } catch (const std::invalid_argument& e) {
        throw haps::ConfigError(e.what());
      }
      const int episodes = base_opt.episodes.value_or(20);
      print_summary(haps::baseline_name(b), haps::evaluate_baseline(cfg, b, scenario, episodes));
      if (!base_trace.empty())
        write_trace_file(cfg, scenario, haps::make_baseline(b, cfg.master_seed), base_trace);
    } else if (*plot_cmd) {
      for (const auto& p : haps::plot_metrics(haps::read_metrics(metrics_path), plot_out, window))
        std::printf("%s\n", p.c_str());
    } else if (*check_cmd) {
      bool ok = true;
      for (const auto& c : haps::run_invariant_checks()) {
        std::printf("[%s] %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
        ok = ok && c.passed;
      }
      return ok ? 0 : 2;
    }
  } catch (const haps::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 2;
  } catch (const haps::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
