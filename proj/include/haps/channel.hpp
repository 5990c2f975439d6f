#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "haps/mobility.hpp"
#include "haps/types.hpp"

namespace haps {

// Extra propagation losses (dB), applied as constants on every link.
struct ExtraAttenuation {
  double gaseous = 0.5;
  double rain = 0.0;
  double cloud = 0.0;
  double scintillation = 0.0;
  double clutter = 0.0;

  double total_db() const {
    return gaseous + rain + cloud + scintillation + clutter;
  }
};

enum class AoaMode { Azimuth, OffNadir };

struct RadioConfig {
  double carrier_hz = 3.5e9;
  double total_bw_hz = 100e6;  // per HAPS
  int num_rb = 25;
  double tx_power_dbm = 55.0;  // split equally across RBs
  double noise_dbm_per_mhz = -114.0;
  double rician_k_db = 10.0;
  double shadowing_std_db = 4.0;
  double boresight_gain_dbi = 30.0;
  double aperture_radius_m = 0.857;
  ExtraAttenuation extra_atten_db;
  AoaMode aoa_mode = AoaMode::Azimuth;

  void validate() const;
  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double rb_bandwidth_hz() const { return total_bw_hz / num_rb; }
  double rb_center_hz(int k) const {
    return carrier_hz + (k + 0.5 - 0.5 * num_rb) * rb_bandwidth_hz();
  }
  double noise_per_rb_dbm() const;
  double noise_per_rb_mw() const { return db_to_linear(noise_per_rb_dbm()); }
  double tx_per_rb_mw() const { return db_to_linear(tx_power_dbm) / num_rb; }
  double rician_k() const { return db_to_linear(rician_k_db); }
};

double fspl_gain(double distance_m, double carrier_hz);
double pathloss_gain(double distance_m, const RadioConfig& cfg);

// Normalized circular-aperture pattern 4 |J1(x)/x|^2, x = k a sin(theta).
double reflector_pattern(double offaxis_rad, const RadioConfig& cfg);
double reflector_gain(double offaxis_rad, const RadioConfig& cfg);
// Off-axis angle between nadir at `haps` and the direction to `ue`.
double offaxis_angle(const Vec3& haps, const Vec3& ue);

// K is linear; K = +inf gives the pure LoS term.
std::complex<double> rician_sample(double k_linear, RandomStream& rng,
                                   double los_phase);

// Per-episode shadowing and per-frame fading for every (ue, haps, rb) link.
struct LinkState {
  MatX shadowing;  // ues x haps, linear power gain
  std::vector<std::complex<double>> fading;
  int num_ues = 0;
  int num_haps = 0;
  int num_rb = 0;

  std::size_t index(int ue, int haps, int rb) const {
    return (static_cast<std::size_t>(ue) * num_haps + haps) * num_rb + rb;
  }
  double fading_power(int ue, int haps, int rb) const {
    return std::norm(fading[index(ue, haps, rb)]);
  }
};

// Global UE index: hotspot * ues_per_hotspot + ue.
Vec3 ue_position(const WorldState& world, const AreaConfig& area, int ue);
Vec3 haps_position(const WorldState& world, const AreaConfig& area, int haps);

LinkState init_links(const AreaConfig& area, const RadioConfig& cfg,
                     RandomStream& shadow_rng);
void redraw_fading(LinkState& links, const WorldState& world,
                   const AreaConfig& area, const RadioConfig& cfg,
                   RandomStream& fading_rng);
// Links with unit fading on every RB.
void set_unit_fading(LinkState& links);

// beta = pathloss * shadowing * antenna gain, ues x haps.
MatX large_scale_gain(const WorldState& world, const LinkState& links,
                      const AreaConfig& area, const RadioConfig& cfg);

// SINR of `ue` on `rb` when served by `serving`; all other HAPS interfere at
// full per-RB power.
double sinr_per_rb(const MatX& beta, const LinkState& links,
                   const RadioConfig& cfg, int ue, int serving, int rb);

// Capacity-based effective SINR mapping.
double effective_sinr(std::span<const double> per_rb_sinrs);

double ue_throughput(double effective, const RadioConfig& cfg,
                     int n_ue_scheduled);

inline constexpr double kFairRateFloor = -3.0;  // log10(1 kbps in Mbps)

struct FairRate {
  double value = 0.0;
  int floored = 0;  // terms that hit the floor
};
FairRate fair_rate(std::span<const double> throughputs_bps,
                   double floor = kFairRateFloor);

struct Aoa {
  double angle = 0.0;
  bool degenerate = false;
};
// Azimuth from the HAPS's ground projection to the UE, [-pi, pi) from east.
Aoa aoa(const Vec2& haps_xy, const Vec2& ue_xy);
Aoa aoa(const Vec3& haps, const Vec3& ue, AoaMode mode);

double wrap_angle(double a);
double circular_mean(std::span<const double> angles);
// sqrt(-2 ln R), R the mean resultant length.
double circular_std(std::span<const double> angles);

// Everything computed for one frame, ues ordered hotspot-major.
struct FrameRadio {
  MatX beta;            // ues x haps
  MatX sinr_rb;         // ues x rb, serving link
  VecX effective_sinr;  // ues
  VecX throughput_bps;  // ues
  VecX aoa;             // ues, from serving HAPS
  FairRate fair;
  int degenerate_aoa = 0;
};

FrameRadio evaluate_frame(const WorldState& world, const LinkState& links,
                          const AreaConfig& area, const RadioConfig& cfg);

struct LinkBudgetRow {
  long frame;
  int ue;
  int haps;
  bool serving;
  double distance_m;
  double fspl_db;
  double antenna_db;
  double shadow_db;
  double sinr_db;  // mean over RBs, as if served by `haps`
};
std::vector<LinkBudgetRow> link_budget(const WorldState& world,
                                       const LinkState& links,
                                       const AreaConfig& area,
                                       const RadioConfig& cfg);
void write_link_budget(std::ostream& os, std::span<const LinkBudgetRow> rows,
                       bool header = true);

}  // namespace haps
