#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "haps/env.hpp"
#include "haps/ppo.hpp"

namespace haps {

inline constexpr int kConfigSchemaVersion = 1;

// Everything a run needs. Stored on disk as JSON with one object per section:
// wind, area, radio (with radio.extra_atten_db), reward, episode,
// observation, action, net, ppo, run. Missing keys keep their defaults;
// unknown keys are rejected.
struct RunConfig {
  EnvConfig env;
  NetConfig net;
  PpoConfig ppo;
  std::uint64_t master_seed = 1;
  int episodes = 12000;
  int eval_every = 500;
  std::vector<int> eval_scenarios{1, 2, 3, 4};
  int eval_episodes = 1;  // per scenario per evaluation round
  std::string output_dir = "runs/default";

  // Throws ConfigError.
  void validate() const;
  ActionSpace action_space() const { return {env.area.num_haps, env.r_max}; }
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

// Hash of the config key layout and schema version.
std::string schema_hash();
// Hash of every setting that changes the policy network's shape or the
// meaning of its inputs and outputs.
std::string policy_fingerprint(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t v);

}  // namespace haps
