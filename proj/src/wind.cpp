#include "haps/wind.hpp"

#include <cmath>
#include <stdexcept>

namespace haps {

void WindConfig::validate() const {
  if (!(temporal_rho >= 0.0 && temporal_rho < 1.0))
    throw std::invalid_argument("wind.temporal_rho must be in [0, 1)");
  if (!(residual_std >= 0.0))
    throw std::invalid_argument("wind.residual_std must be >= 0");
  if (slow_period < 1)
    throw std::invalid_argument("wind.slow_period must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("wind.dt must be > 0");
}

Vec2 WindConfig::mean_direction_unit() const {
  return {std::cos(mean_direction), std::sin(mean_direction)};
}

Vec2 slow_variation(const WindConfig& cfg, long frame) {
  const double phase =
      2.0 * kPi * static_cast<double>(frame) / cfg.slow_period;
  return cfg.slow_amplitude * std::sin(phase) * cfg.mean_direction_unit();
}

Vec2 mean_flow(const WindConfig& cfg) {
  return cfg.mean_speed * cfg.mean_direction_unit();
}

Vec2 ar1_step(const Vec2& residual, const WindConfig& cfg, const Vec2& noise) {
  const double rho = cfg.temporal_rho;
  const double innovation = cfg.residual_std * std::sqrt(1.0 - rho * rho);
  return rho * residual + innovation * noise;
}

WindState ar1_step(const WindState& state, const WindConfig& cfg,
                   std::span<const Vec2> noise) {
  if (noise.size() != state.residual.size())
    throw std::invalid_argument("ar1_step: one noise vector per residual");
  WindState next;
  next.residual.reserve(state.residual.size());
  for (std::size_t i = 0; i < noise.size(); ++i)
    next.residual.push_back(ar1_step(state.residual[i], cfg, noise[i]));
  next.frame_index = state.frame_index + 1;
  return next;
}

WindState advance_wind(const WindState& state, const WindConfig& cfg,
                       RandomStream& rng) {
  std::vector<Vec2> noise(state.residual.size());
  for (auto& n : noise) n = rng.gaussian2();
  return ar1_step(state, cfg, noise);
}

WindState init_wind(const WindConfig& cfg, int num_haps, RandomStream& rng) {
  WindState s;
  const int n = cfg.shared_field ? 1 : num_haps;
  s.residual.reserve(n);
  for (int i = 0; i < n; ++i) s.residual.push_back(cfg.residual_std * rng.gaussian2());
  return s;
}

Vec2 wind_velocity(const WindState& state, const WindConfig& cfg, int haps) {
  const std::size_t idx =
      state.residual.size() == 1 ? 0 : static_cast<std::size_t>(haps);
  return mean_flow(cfg) + slow_variation(cfg, state.frame_index) +
         state.residual.at(idx);
}

}  // namespace haps
