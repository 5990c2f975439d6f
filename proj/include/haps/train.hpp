#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "haps/baselines.hpp"
#include "haps/checkpoint.hpp"
#include "haps/config.hpp"
#include "haps/ppo.hpp"

namespace haps {

// Seed streams derived from the master seed.
std::uint64_t train_episode_seed(std::uint64_t master, int episode);
// Paired across policies and baselines: the same (scenario, index) always
// gets the same environment realisation.
std::uint64_t eval_episode_seed(std::uint64_t master, int scenario, int index);

CheckpointMeta checkpoint_meta(const RunConfig& cfg);
PolicyParams fresh_params(const RunConfig& cfg, std::uint64_t seed);
PolicyParams load_policy(const RunConfig& cfg, const std::string& path);

// Deterministic (mean-action) controller.
Controller policy_controller(const PolicyParams& params);

struct EvalSummary {
  std::string scenario;
  int episodes = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double mean_throughput_mbps = 0.0;
  double std_throughput_mbps = 0.0;
  double mean_fair_rate = 0.0;
  std::vector<double> per_frame_reward_var;  // per episode
  std::vector<EpisodeSummary> runs;
};

// `make_controller(i)` builds the controller for evaluation episode i.
EvalSummary evaluate(const RunConfig& cfg, const Scenario& scenario, int episodes,
                     const std::function<Controller(int)>& make_controller);
EvalSummary evaluate_policy(const RunConfig& cfg, const PolicyParams& params,
                            const Scenario& scenario, int episodes);
EvalSummary evaluate_baseline(const RunConfig& cfg, Baseline baseline,
                              const Scenario& scenario, int episodes);

struct TrainResult {
  std::string metrics_path;
  std::string final_checkpoint;
  std::string best_checkpoint;
  double best_eval_reward = 0.0;
  std::vector<double> train_rewards;  // mean reward per training episode
  PolicyParams final_params;
};

// Runs cfg.episodes training episodes (random HAPS starts, one PPO update per
// episode), evaluating on cfg.eval_scenarios every cfg.eval_every episodes.
// Writes <out>/metrics.csv, <out>/final.ckpt, <out>/best.ckpt and
// <out>/config.json. On a numerical abort writes <out>/abort.txt and
// <out>/abort.ckpt, then rethrows NumericalError.
TrainResult train(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace haps
