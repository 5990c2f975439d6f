#pragma once

#include <span>
#include <vector>

#include "haps/types.hpp"

namespace haps {

// Horizontal stratospheric wind: constant mean flow, a slow sinusoid along
// the mean direction, and an AR(1) residual whose stationary std is
// residual_std.
struct WindConfig {
  double mean_speed = 4.0;       // m/s
  double mean_direction = 0.0;   // rad from east
  double residual_std = 2.0;     // m/s, stationary
  double temporal_rho = 0.95;
  double slow_amplitude = 1.0;   // m/s
  int slow_period = 128;         // frames
  double dt = 2.0;               // s per frame
  bool shared_field = true;      // one residual for every HAPS
  double spatial_scale_m = 1000.0;  // metadata only

  void validate() const;
  Vec2 mean_direction_unit() const;
};

struct WindState {
  // One entry when shared_field, otherwise one per HAPS.
  std::vector<Vec2> residual;
  long frame_index = 0;
};

Vec2 slow_variation(const WindConfig& cfg, long frame);
Vec2 mean_flow(const WindConfig& cfg);

Vec2 ar1_step(const Vec2& residual, const WindConfig& cfg, const Vec2& noise);
WindState ar1_step(const WindState& state, const WindConfig& cfg,
                   std::span<const Vec2> noise);

// Draws innovations for every residual entry from `rng` and advances.
WindState advance_wind(const WindState& state, const WindConfig& cfg,
                       RandomStream& rng);

// Residuals start from the stationary distribution.
WindState init_wind(const WindConfig& cfg, int num_haps, RandomStream& rng);

// Wind acting on HAPS `haps`; with a shared field every index sees the same
// vector.
Vec2 wind_velocity(const WindState& state, const WindConfig& cfg,
                   int haps = 0);

}  // namespace haps
