#include "haps/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "haps/errors.hpp"
#include "haps/metrics.hpp"

namespace haps {

namespace {
enum Stream : std::uint64_t {
  kTrainEpisode = 101,
  kEvalEpisode = 102,
  kAgent = 103,
  kBaselineRng = 104
};

MetricsRow to_row(int episode, const char* phase, const std::string& scenario,
                  const EpisodeSummary& s) {
  return {episode, phase, scenario, s.mean_reward, s.mean_fair_rate,
          s.mean_sum_throughput_mbps, s.haps_distance_m, s.wind_speed_mean,
          s.wind_speed_max};
}

MetricsRow to_row(int episode, const EvalSummary& e) {
  MetricsRow r;
  r.episode = episode;
  r.phase = "eval";
  r.scenario = e.scenario;
  r.mean_reward = e.mean_reward;
  r.mean_fair_rate = e.mean_fair_rate;
  r.mean_sum_throughput_mbps = e.mean_throughput_mbps;
  const std::size_t D = e.runs.front().haps_distance_m.size();
  r.haps_distance_m.assign(D, 0.0);
  for (const auto& run : e.runs) {
    for (std::size_t d = 0; d < D; ++d) r.haps_distance_m[d] += run.haps_distance_m[d] / e.runs.size();
    r.wind_speed_mean += run.wind_speed_mean / e.runs.size();
    r.wind_speed_max = std::max(r.wind_speed_max, run.wind_speed_max);
  }
  return r;
}
}  // namespace

std::uint64_t train_episode_seed(std::uint64_t master, int episode) {
  return derive_seed(master, kTrainEpisode, static_cast<std::uint64_t>(episode));
}

std::uint64_t eval_episode_seed(std::uint64_t master, int scenario, int index) {
  return derive_seed(master, kEvalEpisode,
                     static_cast<std::uint64_t>(scenario) * 1000003ULL +
                         static_cast<std::uint64_t>(index));
}

CheckpointMeta checkpoint_meta(const RunConfig& cfg) {
  return {schema_hash(), policy_fingerprint(cfg)};
}

PolicyParams fresh_params(const RunConfig& cfg, std::uint64_t seed) {
  RandomStream rng(seed);
  const int obs_dim = kFeaturesPerHaps * cfg.env.area.num_haps * cfg.env.observation.memory;
  return PolicyParams::make(obs_dim, cfg.action_space(), cfg.net, rng);
}

PolicyParams load_policy(const RunConfig& cfg, const std::string& path) {
  return load_checkpoint(path, fresh_params(cfg, 0), checkpoint_meta(cfg));
}

Controller policy_controller(const PolicyParams& params) {
  return [params](const HapsEnv&, const Observation& obs) {
    return mean_action(policy_forward(params, obs.normalized), params.space).actions;
  };
}

EvalSummary evaluate(const RunConfig& cfg, const Scenario& scenario, int episodes,
                     const std::function<Controller(int)>& make_controller) {
  if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
  HapsEnv env(cfg.env);
  EvalSummary e;
  e.scenario = scenario.name();
  e.episodes = episodes;
  for (int i = 0; i < episodes; ++i) {
    const auto seed = eval_episode_seed(cfg.master_seed, scenario.id(), i);
    e.runs.push_back(run_episode(env, scenario, seed, make_controller(i)));
    const auto& rw = e.runs.back().rewards;
    double m = 0.0, v = 0.0;
    for (double r : rw) m += r / rw.size();
    for (double r : rw) v += (r - m) * (r - m) / rw.size();
    e.per_frame_reward_var.push_back(v);
  }
  for (const auto& r : e.runs) {
    e.mean_reward += r.mean_reward / episodes;
    e.mean_throughput_mbps += r.mean_sum_throughput_mbps / episodes;
    e.mean_fair_rate += r.mean_fair_rate / episodes;
  }
  for (const auto& r : e.runs) {
    e.std_reward += std::pow(r.mean_reward - e.mean_reward, 2) / episodes;
    e.std_throughput_mbps += std::pow(r.mean_sum_throughput_mbps - e.mean_throughput_mbps, 2) / episodes;
  }
  e.std_reward = std::sqrt(e.std_reward);
  e.std_throughput_mbps = std::sqrt(e.std_throughput_mbps);
  return e;
}

EvalSummary evaluate_policy(const RunConfig& cfg, const PolicyParams& params,
                            const Scenario& scenario, int episodes) {
  const Controller c = policy_controller(params);
  return evaluate(cfg, scenario, episodes, [&](int) { return c; });
}

EvalSummary evaluate_baseline(const RunConfig& cfg, Baseline baseline,
                              const Scenario& scenario, int episodes) {
  return evaluate(cfg, scenario, episodes, [&](int i) {
    return make_baseline(baseline, derive_seed(cfg.master_seed, kBaselineRng,
                                               static_cast<std::uint64_t>(i)));
  });
}

TrainResult train(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir))
    throw ConfigError("cannot create output directory " + cfg.output_dir);
  {
    std::ofstream c(fs::path(cfg.output_dir) / "config.json");
    if (!c) throw ConfigError("output directory " + cfg.output_dir + " is not writable");
    c << dump_config(cfg);
  }

  TrainResult result;
  result.metrics_path = (fs::path(cfg.output_dir) / "metrics.csv").string();
  result.final_checkpoint = (fs::path(cfg.output_dir) / "final.ckpt").string();
  result.best_checkpoint = (fs::path(cfg.output_dir) / "best.ckpt").string();
  const CheckpointMeta meta = checkpoint_meta(cfg);
  MetricsWriter metrics(result.metrics_path, cfg.env.area.num_haps);

  HapsEnv env(cfg.env);
  PpoAgent agent(fresh_params(cfg, derive_seed(cfg.master_seed, kAgent)), cfg.ppo,
                 derive_seed(cfg.master_seed, kAgent, 1));
  RolloutBuffer buffer(cfg.ppo.rollout_frames);
  bool have_best = false;
  result.best_eval_reward = -1.0;

  Observation obs;
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    obs = env.reset(Scenario::random(), train_episode_seed(cfg.master_seed, episode));
    EpisodeSummary s;
    s.haps_distance_m.assign(env.num_haps(), 0.0);
    int frames = 0;
    try {
      while (!env.done()) {
        const auto step = agent.act(obs.normalized, true);
        StepResult r = env.step(step.action.actions);
        buffer.add(obs.normalized, step.action, r.reward, step.value, r.done);
        obs = std::move(r.observation);
        s.mean_reward += r.reward;
        s.mean_fair_rate += r.info.fair_rate;
        s.mean_sum_throughput_mbps += r.info.sum_throughput_mbps;
        for (int d = 0; d < env.num_haps(); ++d) s.haps_distance_m[d] += r.info.haps_to_hotspot_m[d];
        s.wind_speed_mean += r.info.wind.norm();
        s.wind_speed_max = std::max(s.wind_speed_max, r.info.wind.norm());
        ++frames;
        if (buffer.full()) {
          const double bootstrap = r.done ? 0.0 : value_forward(agent.params(), obs.normalized);
          agent.update(buffer, bootstrap);
        }
      }
    } catch (const NumericalError& e) {
      std::ofstream dump(fs::path(cfg.output_dir) / "abort.txt");
      dump << "numerical abort in training episode " << episode << " frame " << frames
           << ": " << e.what() << "\n";
      save_checkpoint((fs::path(cfg.output_dir) / "abort.ckpt").string(), agent.params(), meta);
      throw;
    }
    const double inv = 1.0 / frames;
    s.mean_reward *= inv;
    s.mean_fair_rate *= inv;
    s.mean_sum_throughput_mbps *= inv;
    for (double& d : s.haps_distance_m) d *= inv;
    s.wind_speed_mean *= inv;
    result.train_rewards.push_back(s.mean_reward);
    metrics.append(to_row(episode + 1, "train", "random", s));

    if ((episode + 1) % cfg.eval_every == 0 && !cfg.eval_scenarios.empty()) {
      double mean = 0.0;
      for (int id : cfg.eval_scenarios) {
        const EvalSummary e =
            evaluate_policy(cfg, agent.params(), Scenario::preset(id), cfg.eval_episodes);
        metrics.append(to_row(episode + 1, e));
        mean += e.mean_reward / cfg.eval_scenarios.size();
      }
      if (!have_best || mean > result.best_eval_reward) {
        have_best = true;
        result.best_eval_reward = mean;
        save_checkpoint(result.best_checkpoint, agent.params(), meta);
      }
      if (log)
        *log << "episode " << episode + 1 << "  train reward " << s.mean_reward
             << "  eval reward " << mean << "\n";
    }
  }
  save_checkpoint(result.final_checkpoint, agent.params(), meta);
  if (!have_best) save_checkpoint(result.best_checkpoint, agent.params(), meta);
  result.final_params = agent.params();
  return result;
}

}  // namespace haps
