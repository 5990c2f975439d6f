#pragma once

#include <functional>
#include <string>
#include <vector>

#include "haps/env.hpp"

namespace haps {

// Chooses the joint action for the environment's current frame.
using Controller =
    std::function<std::vector<Action>(const HapsEnv& env, const Observation& obs)>;

enum class Baseline { Static, NoControl, Oracle, Random };

Baseline parse_baseline(const std::string& name);
const char* baseline_name(Baseline b);

// Non-learned comparators.
//   static:    hold the scenario start position, cancelling the expected wind
//   nocontrol: zero actions, the HAPS drift with the wind
//   oracle:    ground-truth access; steer toward where the own hotspot will be
//              after this frame, cancelling the expected wind
//   random:    uniform angle and distance
// Commands are clipped to r_max. Build a fresh controller per episode.
Controller make_baseline(Baseline b, std::uint64_t seed);

// Displacement command for `desired` metres of travel this frame.
Action command_towards(const Vec2& desired, double r_max);

struct EpisodeSummary {
  double mean_reward = 0.0;
  double mean_fair_rate = 0.0;
  double mean_sum_throughput_mbps = 0.0;
  std::vector<double> haps_distance_m;
  double wind_speed_mean = 0.0;
  double wind_speed_max = 0.0;
  std::vector<double> rewards;  // per frame
};

EpisodeSummary run_episode(HapsEnv& env, const Scenario& scenario,
                           std::uint64_t seed, const Controller& controller);

}  // namespace haps
