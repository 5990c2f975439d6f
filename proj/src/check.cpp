#include "haps/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "haps/channel.hpp"
#include "haps/env.hpp"
#include "haps/nn/gae.hpp"
#include "haps/ppo.hpp"
#include "haps/wind.hpp"

namespace haps {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CheckResult wind_statistics() {
  WindConfig cfg;
  RandomStream rng(7);
  WindState s = init_wind(cfg, 1, rng);
  const int n = 100000;
  double sum = 0, sum2 = 0, lag = 0;
  double prev = s.residual[0].x();
  for (int i = 0; i < n; ++i) {
    s = advance_wind(s, cfg, rng);
    const double x = s.residual[0].x();
    sum += x;
    sum2 += x * x;
    lag += x * prev;
    prev = x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double rho = (lag / n - mean * mean) / var;
  const double sd = std::sqrt(var);
  return {"wind AR(1) stationary std and lag-1 correlation",
          std::abs(sd - cfg.residual_std) <= 0.05 * cfg.residual_std &&
              std::abs(rho - cfg.temporal_rho) <= 0.02,
          "std " + num(sd) + ", rho " + num(rho)};
}

CheckResult link_budget() {
  RadioConfig cfg;
  const double fspl_db = -linear_to_db(fspl_gain(20000.0, cfg.carrier_hz));
  const double noise = cfg.noise_per_rb_dbm();
  return {"link budget golden values",
          std::abs(fspl_db - 129.35) <= 0.01 && std::abs(noise + 107.98) <= 0.01 &&
              reflector_pattern(0.0, cfg) == 1.0,
          "fspl " + num(fspl_db) + " dB, noise/RB " + num(noise) + " dBm"};
}

CheckResult fading_power() {
  RandomStream rng(3);
  const double k = db_to_linear(10.0);
  double acc = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += std::norm(rician_sample(k, rng, 0.3 * i));
  acc /= n;
  return {"Rician fading has unit mean power", std::abs(acc - 1.0) < 0.01,
          "E|h|^2 = " + num(acc)};
}

CheckResult esm_sandwich() {
  RandomStream rng(5);
  bool ok = true;
  for (int t = 0; t < 1000 && ok; ++t) {
    std::vector<double> g(1 + t % 25);
    for (auto& x : g) x = std::exp(rng.uniform(-5.0, 8.0));
    const double eff = effective_sinr(g);
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    ok = eff >= *lo * (1 - 1e-12) && eff <= *hi * (1 + 1e-12);
  }
  return {"effective SINR lies between min and max", ok, ""};
}

CheckResult reward_calibration() {
  RewardConfig cfg;
  const double mid = sigmoid_reward(50.0, cfg);
  const double r54 = sigmoid_reward(54.0, cfg);
  return {"sigmoid reward calibration",
          mid == 0.5 && std::abs(r54 - 0.7310585786300049) < 1e-4,
          "R(50) = " + num(mid) + ", R(54) = " + num(r54)};
}

CheckResult gradients() {
  RandomStream rng(11);
  NetConfig net;
  net.hidden_layers = 2;
  net.hidden_width = 4;
  net.policy_output_gain = 0.5;
  PpoConfig cfg;
  ActionSpace space{1, 50.0};
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    PolicyParams p = PolicyParams::make(3, space, net, rng);
    Batch b{MatX(3, 8), MatX(2, 8), VecX(8), VecX(8), VecX(8)};
    for (int i = 0; i < 8; ++i) {
      for (int r = 0; r < 3; ++r) b.obs(r, i) = rng.uniform(-1, 1);
      const auto out = policy_forward(p, b.obs.col(i));
      const auto s = sample_action(out, space, rng);
      b.raw.col(i) = s.raw;
      b.old_log_prob[i] = s.log_prob + 0.1 * rng.gaussian();
      b.advantages[i] = rng.gaussian();
      b.returns[i] = rng.gaussian();
    }
    worst = std::max(worst, grad_check(p, b, cfg));
  }
  return {"PPO loss gradient matches finite differences", worst < 1e-4,
          "max rel err " + num(worst)};
}

CheckResult gae_limits() {
  const std::vector<double> r{1.0, 0.5, 2.0}, v{0.3, -0.2, 0.7};
  const std::vector<std::uint8_t> done{0, 0, 1};
  const auto td = nn::gae<double>(r, v, done, 0.0, 0.9, 0.0);
  const auto mc = nn::gae<double>(r, std::vector<double>{0, 0, 0}, done, 0.0, 1.0, 1.0);
  const bool ok = std::abs(td.advantages[0] - (1.0 + 0.9 * -0.2 - 0.3)) < 1e-12 &&
                  std::abs(mc.advantages[0] - 3.5) < 1e-12 &&
                  std::abs(td.advantages[2] - (2.0 - 0.7)) < 1e-12;
  return {"GAE one-step and Monte-Carlo limits", ok, ""};
}

CheckResult env_determinism() {
  EnvConfig cfg;
  HapsEnv a(cfg), b(cfg);
  const auto oa = a.reset(Scenario::preset(1), 99);
  const auto ob = b.reset(Scenario::preset(1), 99);
  bool same = oa.raw == ob.raw;
  std::vector<Action> act(3, Action{0.5, 10.0});
  for (int i = 0; i < 20 && same; ++i) {
    const auto ra = a.step(act);
    const auto rb = b.step(act);
    same = ra.observation.raw == rb.observation.raw && ra.reward == rb.reward;
  }
  return {"environment is deterministic for a fixed seed", same, ""};
}

}  // namespace

std::vector<CheckResult> run_invariant_checks() {
  return {wind_statistics(), link_budget(),   fading_power(), esm_sandwich(),
          reward_calibration(), gradients(), gae_limits(),   env_determinism()};
}

}  // namespace haps
