#include "haps/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace haps {

namespace {
enum Stream : std::uint64_t { kWorld = 1, kWind = 2, kShadow = 3, kFading = 4 };
}

void EnvConfig::validate() const {
  wind.validate();
  area.validate();
  radio.validate();
  if (!(reward.c_s > 0.0)) throw std::invalid_argument("reward.c_s must be > 0");
  if (episode.frames_per_episode < 1)
    throw std::invalid_argument("episode.frames_per_episode must be >= 1");
  if (!(episode.dt > 0.0)) throw std::invalid_argument("episode.dt must be > 0");
  if (std::abs(episode.dt - wind.dt) > 1e-12)
    throw std::invalid_argument("episode.dt and wind.dt must agree");
  if (observation.memory < 1)
    throw std::invalid_argument("observation.memory must be >= 1");
  if (!(observation.sinr_max_db > observation.sinr_min_db))
    throw std::invalid_argument("observation SINR window is empty");
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be > 0");
}

double sigmoid_reward(double fair_rate, const RewardConfig& cfg) {
  return 1.0 / (1.0 + std::exp(-cfg.c_s * (fair_rate - cfg.c_m)));
}

FrameFeatures observe(const WorldState& world, const AreaConfig& area,
                      const MatX& effective_sinr, const MatX& aoa_matrix,
                      const ObservationConfig& cfg) {
  const int D = world.num_haps();
  const int N = static_cast<int>(effective_sinr.rows());
  FrameFeatures f;
  f.raw.resize(kFeaturesPerHaps * D);
  f.normalized.resize(kFeaturesPerHaps * D);
  std::vector<double> angles(N);
  for (int d = 0; d < D; ++d) {
    double mean_db = 0.0;
    for (int n = 0; n < N; ++n) {
      // Floor at 1e-30 so a zero SINR stays finite in dB.
      mean_db += linear_to_db(std::max(effective_sinr(n, d), 1e-30));
      angles[n] = aoa_matrix(n, d);
    }
    mean_db /= N;
    const double aoa_mean = circular_mean(angles);
    const double aoa_std = circular_std(angles);

    const Vec2& xy = world.haps_xy[d];
    auto raw = f.raw.segment<kFeaturesPerHaps>(kFeaturesPerHaps * d);
    raw << xy.x(), xy.y(), area.haps_altitude, mean_db, aoa_mean, aoa_std;

    const double clipped =
        std::clamp(mean_db, cfg.sinr_min_db, cfg.sinr_max_db);
    const double sinr_scaled = 2.0 * (clipped - cfg.sinr_min_db) /
                                   (cfg.sinr_max_db - cfg.sinr_min_db) -
                               1.0;
    const double std_scaled = 2.0 * std::min(aoa_std, kPi) / kPi - 1.0;
    auto norm = f.normalized.segment<kFeaturesPerHaps>(kFeaturesPerHaps * d);
    norm << xy.x() / area.half_extent, xy.y() / area.half_extent, sinr_scaled,
        std::sin(aoa_mean), std::cos(aoa_mean), std_scaled;
  }
  return f;
}

void write_trace(std::ostream& os, std::span<const TraceRow> rows) {
  if (rows.empty()) return;
  const std::size_t D = rows.front().haps_xy.size();
  os << "frame";
  for (std::size_t d = 1; d <= D; ++d)
    os << ",haps" << d << "_x,haps" << d << "_y";
  for (std::size_t h = 1; h <= rows.front().hotspot_xy.size(); ++h)
    os << ",hotspot" << h << "_x,hotspot" << h << "_y";
  os << ",wind_x,wind_y,fair_rate,reward\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.9g", v);
    os << buf;
  };
  for (const auto& r : rows) {
    os << r.frame;
    for (const auto& p : r.haps_xy) { put(p.x()); put(p.y()); }
    for (const auto& p : r.hotspot_xy) { put(p.x()); put(p.y()); }
    put(r.wind.x());
    put(r.wind.y());
    put(r.fair_rate);
    put(r.reward);
    os << '\n';
  }
}

HapsEnv::HapsEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

int HapsEnv::observation_size() const {
  return kFeaturesPerHaps * num_haps() * cfg_.observation.memory;
}

Vec2 HapsEnv::current_wind(int haps) const {
  return wind_velocity(wind_, cfg_.wind, haps);
}

Vec2 HapsEnv::expected_next_wind(int haps) const {
  const std::size_t idx = wind_.residual.size() == 1 ? 0 : haps;
  return mean_flow(cfg_.wind) + slow_variation(cfg_.wind, wind_.frame_index + 1) +
         cfg_.wind.temporal_rho * wind_.residual.at(idx);
}

Observation HapsEnv::reset(const Scenario& scenario, std::uint64_t seed) {
  RandomStream world_rng(derive_seed(seed, kWorld));
  RandomStream shadow_rng(derive_seed(seed, kShadow));
  wind_rng_ = RandomStream(derive_seed(seed, kWind));
  fading_rng_ = RandomStream(derive_seed(seed, kFading));

  world_ = init_world(cfg_.area, scenario, world_rng);
  wind_ = init_wind(cfg_.wind, num_haps(), wind_rng_);
  links_ = init_links(cfg_.area, cfg_.radio, shadow_rng);
  frame_ = 0;
  started_ = true;
  trace_.clear();
  redraw_fading(links_, world_, cfg_.area, cfg_.radio, fading_rng_);
  evaluate();

  // Pad the history with the first frame.
  history_.clear();
  MatX eff = radio_.effective_sinr.reshaped(cfg_.area.ues_per_hotspot, num_haps());
  MatX ang = radio_.aoa.reshaped(cfg_.area.ues_per_hotspot, num_haps());
  const FrameFeatures first =
      observe(world_, cfg_.area, eff, ang, cfg_.observation);
  for (int m = 0; m < cfg_.observation.memory; ++m) history_.push_back(first);
  record(sigmoid_reward(info_.fair_rate, cfg_.reward));
  return assemble();
}

StepResult HapsEnv::step(std::span<const Action> joint_action) {
  if (!started_) throw std::logic_error("step before reset");
  if (done()) throw std::logic_error("step after episode end");
  if (static_cast<int>(joint_action.size()) != num_haps())
    throw std::invalid_argument("step: one action per HAPS");
  const double dt = cfg_.episode.dt;

  wind_ = advance_wind(wind_, cfg_.wind, wind_rng_);
  std::vector<Vec2> winds(num_haps());
  for (int d = 0; d < num_haps(); ++d) winds[d] = current_wind(d);
  world_ = step_haps(world_, cfg_.area, joint_action, winds, dt, cfg_.r_max);
  world_ = step_hotspots(world_, cfg_.area, dt);
  ++frame_;
  world_.frame = frame_;
  redraw_fading(links_, world_, cfg_.area, cfg_.radio, fading_rng_);
  evaluate();

  MatX eff = radio_.effective_sinr.reshaped(cfg_.area.ues_per_hotspot, num_haps());
  MatX ang = radio_.aoa.reshaped(cfg_.area.ues_per_hotspot, num_haps());
  history_.push_back(observe(world_, cfg_.area, eff, ang, cfg_.observation));
  history_.pop_front();

  StepResult out;
  out.reward = sigmoid_reward(info_.fair_rate, cfg_.reward);
  out.done = done();
  out.observation = assemble();
  out.info = info_;
  record(out.reward);
  return out;
}

void HapsEnv::evaluate() {
  radio_ = evaluate_frame(world_, links_, cfg_.area, cfg_.radio);
  info_.fair_rate = radio_.fair.value;
  info_.floored_rates = radio_.fair.floored;
  info_.sum_throughput_mbps = radio_.throughput_bps.sum() / 1e6;
  info_.haps_to_hotspot_m.resize(num_haps());
  for (int d = 0; d < num_haps(); ++d)
    info_.haps_to_hotspot_m[d] = (world_.haps_xy[d] - world_.hotspot_xy[d]).norm();
  info_.wind = current_wind(0);
}

Observation HapsEnv::assemble() const {
  const int block = kFeaturesPerHaps * num_haps();
  Observation obs;
  obs.raw.resize(block * cfg_.observation.memory);
  obs.normalized.resize(block * cfg_.observation.memory);
  int m = 0;
  for (const auto& f : history_) {
    obs.raw.segment(block * m, block) = f.raw;
    obs.normalized.segment(block * m, block) = f.normalized;
    ++m;
  }
  return obs;
}

void HapsEnv::record(double reward) {
  if (!trace_enabled_) return;
  trace_.push_back({frame_, world_.haps_xy, world_.hotspot_xy, current_wind(0),
                    info_.fair_rate, reward});
}

}  // namespace haps
