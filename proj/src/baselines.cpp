#include "haps/baselines.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace haps {

Baseline parse_baseline(const std::string& name) {
  if (name == "static") return Baseline::Static;
  if (name == "nocontrol") return Baseline::NoControl;
  if (name == "oracle") return Baseline::Oracle;
  if (name == "random") return Baseline::Random;
  throw std::invalid_argument("unknown baseline \"" + name +
                              "\" (static|nocontrol|oracle|random)");
}

const char* baseline_name(Baseline b) {
  switch (b) {
    case Baseline::Static: return "static";
    case Baseline::NoControl: return "nocontrol";
    case Baseline::Oracle: return "oracle";
    case Baseline::Random: return "random";
  }
  return "?";
}

Action command_towards(const Vec2& desired, double r_max) {
  const double norm = desired.norm();
  if (norm == 0.0) return {0.0, 0.0};
  return {wrap_angle(std::atan2(desired.y(), desired.x())), std::min(norm, r_max)};
}

Controller make_baseline(Baseline b, std::uint64_t seed) {
  switch (b) {
    case Baseline::NoControl:
      return [](const HapsEnv& env, const Observation&) {
        return std::vector<Action>(env.num_haps());
      };
    case Baseline::Static: {
      auto anchor = std::make_shared<std::vector<Vec2>>();
      return [anchor](const HapsEnv& env, const Observation&) {
        if (env.frame() == 0) *anchor = env.world().haps_xy;
        const double dt = env.config().episode.dt;
        std::vector<Action> out(env.num_haps());
        for (int d = 0; d < env.num_haps(); ++d) {
          const Vec2 desired = (*anchor)[d] - env.world().haps_xy[d] -
                               env.expected_next_wind(d) * dt;
          out[d] = command_towards(desired, env.config().r_max);
        }
        return out;
      };
    }
    case Baseline::Oracle:
      return [](const HapsEnv& env, const Observation&) {
        const auto& cfg = env.config();
        const WorldState next = step_hotspots(env.world(), cfg.area, cfg.episode.dt);
        std::vector<Action> out(env.num_haps());
        for (int d = 0; d < env.num_haps(); ++d) {
          const Vec2 desired = next.hotspot_xy[d] - env.world().haps_xy[d] -
                               env.expected_next_wind(d) * cfg.episode.dt;
          out[d] = command_towards(desired, cfg.r_max);
        }
        return out;
      };
    case Baseline::Random: {
      auto rng = std::make_shared<RandomStream>(seed);
      return [rng](const HapsEnv& env, const Observation&) {
        std::vector<Action> out(env.num_haps());
        for (auto& a : out) {
          a.angle = wrap_angle(rng->uniform(-kPi, kPi));
          a.distance = rng->uniform(0.0, env.config().r_max);
        }
        return out;
      };
    }
  }
  throw std::invalid_argument("unknown baseline");
}

EpisodeSummary run_episode(HapsEnv& env, const Scenario& scenario,
                           std::uint64_t seed, const Controller& controller) {
  Observation obs = env.reset(scenario, seed);
  EpisodeSummary s;
  s.haps_distance_m.assign(env.num_haps(), 0.0);
  int frames = 0;
  while (!env.done()) {
    const auto actions = controller(env, obs);
    StepResult r = env.step(actions);
    obs = std::move(r.observation);
    s.rewards.push_back(r.reward);
    s.mean_reward += r.reward;
    s.mean_fair_rate += r.info.fair_rate;
    s.mean_sum_throughput_mbps += r.info.sum_throughput_mbps;
    for (int d = 0; d < env.num_haps(); ++d) s.haps_distance_m[d] += r.info.haps_to_hotspot_m[d];
    const double speed = r.info.wind.norm();
    s.wind_speed_mean += speed;
    s.wind_speed_max = std::max(s.wind_speed_max, speed);
    ++frames;
  }
  const double inv = 1.0 / frames;
  s.mean_reward *= inv;
  s.mean_fair_rate *= inv;
  s.mean_sum_throughput_mbps *= inv;
  for (double& d : s.haps_distance_m) d *= inv;
  s.wind_speed_mean *= inv;
  return s;
}

}  // namespace haps
