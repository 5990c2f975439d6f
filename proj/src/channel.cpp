#include "haps/channel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace haps {

void RadioConfig::validate() const {
  if (num_rb < 1) throw std::invalid_argument("radio.num_rb must be >= 1");
  if (!(carrier_hz > 0.0) || !(total_bw_hz > 0.0))
    throw std::invalid_argument("radio: carrier and bandwidth must be > 0");
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_dbm_per_mhz))
    throw std::invalid_argument("radio: powers must be finite");
  if (!(rician_k() >= 0.0))
    throw std::invalid_argument("radio: Rician K must be >= 0");
  if (!(shadowing_std_db >= 0.0))
    throw std::invalid_argument("radio.shadowing_std_db must be >= 0");
  if (!(aperture_radius_m > 0.0))
    throw std::invalid_argument("radio.aperture_radius_m must be > 0");
}

double RadioConfig::noise_per_rb_dbm() const {
  return noise_dbm_per_mhz + 10.0 * std::log10(rb_bandwidth_hz() / 1e6);
}

double fspl_gain(double distance_m, double carrier_hz) {
  const double r = kSpeedOfLight / (4.0 * kPi * distance_m * carrier_hz);
  return r * r;
}

double pathloss_gain(double distance_m, const RadioConfig& cfg) {
  return fspl_gain(distance_m, cfg.carrier_hz) *
         db_to_linear(-cfg.extra_atten_db.total_db());
}

double reflector_pattern(double offaxis_rad, const RadioConfig& cfg) {
  const double k = 2.0 * kPi / cfg.wavelength();
  const double x = k * cfg.aperture_radius_m * std::sin(offaxis_rad);
  if (std::abs(x) < 1e-8) return 1.0;
  const double r = std::cyl_bessel_j(1.0, std::abs(x)) / std::abs(x);
  return 4.0 * r * r;
}

double reflector_gain(double offaxis_rad, const RadioConfig& cfg) {
  return db_to_linear(cfg.boresight_gain_dbi) *
         reflector_pattern(offaxis_rad, cfg);
}

double offaxis_angle(const Vec3& haps, const Vec3& ue) {
  const double horizontal = (ue.head<2>() - haps.head<2>()).norm();
  return std::atan2(horizontal, haps.z() - ue.z());
}

std::complex<double> rician_sample(double k_linear, RandomStream& rng,
                                   double los_phase) {
  const std::complex<double> los = std::polar(1.0, los_phase);
  if (std::isinf(k_linear)) return los;
  const double re = rng.gaussian();
  const double im = rng.gaussian();
  const std::complex<double> nlos(re / std::sqrt(2.0), im / std::sqrt(2.0));
  return std::sqrt(k_linear / (1.0 + k_linear)) * los +
         std::sqrt(1.0 / (1.0 + k_linear)) * nlos;
}

Vec3 ue_position(const WorldState& world, const AreaConfig& area, int ue) {
  const int h = ue / area.ues_per_hotspot;
  const int n = ue % area.ues_per_hotspot;
  const Vec2 xy = world.ue_xy(h, n);
  return {xy.x(), xy.y(), area.ue_altitude};
}

Vec3 haps_position(const WorldState& world, const AreaConfig& area, int haps) {
  const Vec2& xy = world.haps_xy[haps];
  return {xy.x(), xy.y(), area.haps_altitude};
}

LinkState init_links(const AreaConfig& area, const RadioConfig& cfg,
                     RandomStream& shadow_rng) {
  LinkState links;
  links.num_ues = area.num_ues();
  links.num_haps = area.num_haps;
  links.num_rb = cfg.num_rb;
  links.shadowing.resize(links.num_ues, links.num_haps);
  for (int u = 0; u < links.num_ues; ++u)
    for (int d = 0; d < links.num_haps; ++d)
      links.shadowing(u, d) =
          db_to_linear(cfg.shadowing_std_db * shadow_rng.gaussian());
  set_unit_fading(links);
  return links;
}

void set_unit_fading(LinkState& links) {
  links.fading.assign(static_cast<std::size_t>(links.num_ues) *
                          links.num_haps * links.num_rb,
                      {1.0, 0.0});
}

void redraw_fading(LinkState& links, const WorldState& world,
                   const AreaConfig& area, const RadioConfig& cfg,
                   RandomStream& fading_rng) {
  const double k_linear = cfg.rician_k();
  for (int u = 0; u < links.num_ues; ++u) {
    const Vec3 ue = ue_position(world, area, u);
    for (int d = 0; d < links.num_haps; ++d) {
      const double dist = (haps_position(world, area, d) - ue).norm();
      for (int k = 0; k < links.num_rb; ++k) {
        // Plane-wave LoS phase from the path length.
        const double cycles = dist * cfg.rb_center_hz(k) / kSpeedOfLight;
        const double phase = -2.0 * kPi * (cycles - std::floor(cycles));
        links.fading[links.index(u, d, k)] =
            rician_sample(k_linear, fading_rng, phase);
      }
    }
  }
}

MatX large_scale_gain(const WorldState& world, const LinkState& links,
                      const AreaConfig& area, const RadioConfig& cfg) {
  MatX beta(links.num_ues, links.num_haps);
  for (int u = 0; u < links.num_ues; ++u) {
    const Vec3 ue = ue_position(world, area, u);
    for (int d = 0; d < links.num_haps; ++d) {
      const Vec3 bs = haps_position(world, area, d);
      const double dist = (bs - ue).norm();
      beta(u, d) = pathloss_gain(dist, cfg) * links.shadowing(u, d) *
                   reflector_gain(offaxis_angle(bs, ue), cfg);
    }
  }
  return beta;
}

double sinr_per_rb(const MatX& beta, const LinkState& links,
                   const RadioConfig& cfg, int ue, int serving, int rb) {
  const double w = cfg.tx_per_rb_mw();
  double interference = 0.0;
  for (int d = 0; d < links.num_haps; ++d) {
    if (d == serving) continue;
    interference += beta(ue, d) * links.fading_power(ue, d, rb) * w;
  }
  const double signal = beta(ue, serving) * links.fading_power(ue, serving, rb) * w;
  return signal / (interference + cfg.noise_per_rb_mw());
}

double effective_sinr(std::span<const double> per_rb_sinrs) {
  if (per_rb_sinrs.empty())
    throw std::invalid_argument("effective_sinr: need at least one RB");
  double bits = 0.0;
  for (double g : per_rb_sinrs) {
    if (!(g >= 0.0)) throw std::invalid_argument("effective_sinr: SINR < 0");
    bits += std::log2(1.0 + g);
  }
  bits /= static_cast<double>(per_rb_sinrs.size());
  return std::exp2(bits) - 1.0;
}

double ue_throughput(double effective, const RadioConfig& cfg,
                     int n_ue_scheduled) {
  if (n_ue_scheduled < 1)
    throw std::invalid_argument("ue_throughput: n_ue_scheduled must be >= 1");
  return cfg.num_rb * cfg.rb_bandwidth_hz() / n_ue_scheduled *
         std::log2(1.0 + effective);
}

FairRate fair_rate(std::span<const double> throughputs_bps, double floor) {
  FairRate out;
  for (double r : throughputs_bps) {
    if (r > 0.0) {
      out.value += std::log10(r / 1e6);
    } else {
      out.value += floor;
      ++out.floored;
    }
  }
  return out;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  a -= kPi;
  return a >= kPi ? -kPi : a;
}

Aoa aoa(const Vec2& haps_xy, const Vec2& ue_xy) {
  const Vec2 d = ue_xy - haps_xy;
  if (d.x() == 0.0 && d.y() == 0.0) return {0.0, true};
  return {wrap_angle(std::atan2(d.y(), d.x())), false};
}

Aoa aoa(const Vec3& haps, const Vec3& ue, AoaMode mode) {
  if (mode == AoaMode::Azimuth) return aoa(Vec2(haps.head<2>()), Vec2(ue.head<2>()));
  return {offaxis_angle(haps, ue), false};
}

namespace {
Vec2 resultant(std::span<const double> angles) {
  Vec2 s = Vec2::Zero();
  for (double a : angles) s += Vec2(std::cos(a), std::sin(a));
  return s / static_cast<double>(angles.size());
}
}  // namespace

double circular_mean(std::span<const double> angles) {
  if (angles.empty()) return 0.0;
  const Vec2 r = resultant(angles);
  return wrap_angle(std::atan2(r.y(), r.x()));
}

double circular_std(std::span<const double> angles) {
  if (angles.empty()) return 0.0;
  const double len = std::min(resultant(angles).norm(), 1.0);
  if (len <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(len));
}

FrameRadio evaluate_frame(const WorldState& world, const LinkState& links,
                          const AreaConfig& area, const RadioConfig& cfg) {
  FrameRadio fr;
  const int U = links.num_ues;
  const int K = links.num_rb;
  fr.beta = large_scale_gain(world, links, area, cfg);
  fr.sinr_rb.resize(U, K);
  fr.effective_sinr.resize(U);
  fr.throughput_bps.resize(U);
  fr.aoa.resize(U);
  std::vector<double> row(K);
  for (int u = 0; u < U; ++u) {
    const int serving = u / area.ues_per_hotspot;
    for (int k = 0; k < K; ++k) {
      row[k] = sinr_per_rb(fr.beta, links, cfg, u, serving, k);
      fr.sinr_rb(u, k) = row[k];
    }
    fr.effective_sinr[u] = effective_sinr(row);
    fr.throughput_bps[u] =
        ue_throughput(fr.effective_sinr[u], cfg, area.ues_per_hotspot);
    const Aoa a = aoa(haps_position(world, area, serving),
                      ue_position(world, area, u), cfg.aoa_mode);
    fr.aoa[u] = a.angle;
    fr.degenerate_aoa += a.degenerate ? 1 : 0;
  }
  fr.fair = fair_rate(std::span<const double>(fr.throughput_bps.data(), U));
  return fr;
}

std::vector<LinkBudgetRow> link_budget(const WorldState& world,
                                       const LinkState& links,
                                       const AreaConfig& area,
                                       const RadioConfig& cfg) {
  std::vector<LinkBudgetRow> rows;
  const MatX beta = large_scale_gain(world, links, area, cfg);
  for (int u = 0; u < links.num_ues; ++u) {
    const Vec3 ue = ue_position(world, area, u);
    for (int d = 0; d < links.num_haps; ++d) {
      const Vec3 bs = haps_position(world, area, d);
      const double dist = (bs - ue).norm();
      double sinr_db = 0.0;
      for (int k = 0; k < links.num_rb; ++k)
        sinr_db += linear_to_db(sinr_per_rb(beta, links, cfg, u, d, k));
      rows.push_back({world.frame, u, d, d == u / area.ues_per_hotspot, dist,
                      -linear_to_db(fspl_gain(dist, cfg.carrier_hz)),
                      linear_to_db(reflector_gain(offaxis_angle(bs, ue), cfg)),
                      linear_to_db(links.shadowing(u, d)),
                      sinr_db / links.num_rb});
    }
  }
  return rows;
}

void write_link_budget(std::ostream& os, std::span<const LinkBudgetRow> rows,
                       bool header) {
  if (header)
    os << "frame,ue,haps,serving,distance_m,fspl_db,antenna_db,shadow_db,"
          "sinr_db\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  r.frame, r.ue, r.haps, r.serving ? 1 : 0, r.distance_m,
                  r.fspl_db, r.antenna_db, r.shadow_db, r.sinr_db);
    os << buf;
  }
}

}  // namespace haps
