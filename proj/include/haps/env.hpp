#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "haps/channel.hpp"
#include "haps/mobility.hpp"
#include "haps/wind.hpp"

namespace haps {

struct RewardConfig {
  double c_s = 0.25;  // slope
  double c_m = 50.0;  // midpoint
};

struct EpisodeConfig {
  int frames_per_episode = 128;
  double dt = 2.0;
};

struct ObservationConfig {
  int memory = 1;  // frames of history stacked into one observation
  double sinr_min_db = -20.0;
  double sinr_max_db = 60.0;
};

struct EnvConfig {
  WindConfig wind;
  AreaConfig area;
  RadioConfig radio;
  RewardConfig reward;
  EpisodeConfig episode;
  ObservationConfig observation;
  double r_max = 50.0;  // m per frame

  void validate() const;
};

double sigmoid_reward(double fair_rate, const RewardConfig& cfg);

inline constexpr int kFeaturesPerHaps = 6;

// Per-frame aggregate for every HAPS, ordered HAPS 1..D.
// raw: (x, y, z, mean SINR dB, circular-mean AoA, circular-std AoA)
// normalized: (x/L, y/L, scaled SINR, sin AoA, cos AoA, scaled AoA std)
struct FrameFeatures {
  VecX raw;
  VecX normalized;
};

struct Observation {
  VecX raw;
  VecX normalized;
  int size() const { return static_cast<int>(normalized.size()); }
};

// effective_sinr and aoa are N x H (UEs of each hotspot in a column).
FrameFeatures observe(const WorldState& world, const AreaConfig& area,
                      const MatX& effective_sinr, const MatX& aoa,
                      const ObservationConfig& cfg);

struct StepInfo {
  double fair_rate = 0.0;
  int floored_rates = 0;
  double sum_throughput_mbps = 0.0;
  std::vector<double> haps_to_hotspot_m;
  Vec2 wind = Vec2::Zero();  // acting on HAPS 1
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct TraceRow {
  long frame;
  std::vector<Vec2> haps_xy;
  std::vector<Vec2> hotspot_xy;
  Vec2 wind;
  double fair_rate;
  double reward;
};
void write_trace(std::ostream& os, std::span<const TraceRow> rows);

class HapsEnv {
 public:
  explicit HapsEnv(EnvConfig cfg);

  Observation reset(const Scenario& scenario, std::uint64_t seed);
  StepResult step(std::span<const Action> joint_action);

  int num_haps() const { return cfg_.area.num_haps; }
  int observation_size() const;
  int action_size() const { return 2 * num_haps(); }
  bool done() const { return frame_ >= cfg_.episode.frames_per_episode; }
  long frame() const { return frame_; }

  const EnvConfig& config() const { return cfg_; }
  const WorldState& world() const { return world_; }
  const WindState& wind_state() const { return wind_; }
  const LinkState& links() const { return links_; }
  const FrameRadio& radio() const { return radio_; }
  const StepInfo& last_info() const { return info_; }
  Vec2 current_wind(int haps) const;
  // Mean of the wind one frame ahead, conditioned on the current residual.
  Vec2 expected_next_wind(int haps) const;

  void set_trace(bool enabled) { trace_enabled_ = enabled; }
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  void evaluate();
  Observation assemble() const;
  void record(double reward);

  EnvConfig cfg_;
  WorldState world_;
  WindState wind_;
  LinkState links_;
  FrameRadio radio_;
  StepInfo info_;
  RandomStream wind_rng_;
  RandomStream fading_rng_;
  std::deque<FrameFeatures> history_;
  long frame_ = 0;
  bool started_ = false;
  bool trace_enabled_ = false;
  std::vector<TraceRow> trace_;
};

}  // namespace haps
