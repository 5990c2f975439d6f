#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "haps/types.hpp"

namespace haps {

struct AreaConfig {
  double half_extent = 750.0;  // (x, y) in [-half_extent, half_extent]^2
  double haps_altitude = 20000.0;
  double ue_altitude = 1.5;
  double hotspot_radius = 50.0;
  int ues_per_hotspot = 10;
  double hotspot_speed = 10.0;
  int num_haps = 3;  // one hotspot per HAPS

  void validate() const;
  int num_ues() const { return num_haps * ues_per_hotspot; }
};

// Commanded horizontal displacement for one frame.
struct Action {
  double angle = 0.0;     // rad from east, [-pi, pi)
  double distance = 0.0;  // m, [0, r_max]
};

// Initial HAPS placement: a preset (1..4), explicit coordinates, or
// uniform-random in the area.
class Scenario {
 public:
  static Scenario random();
  static Scenario preset(int id);
  static Scenario custom(std::vector<Vec2> haps_xy);
  // "1".."4" or "random".
  static Scenario parse(const std::string& text);

  bool is_random() const { return !positions_; }
  // 0 for random and custom placements.
  int id() const { return id_; }
  const std::vector<Vec2>& positions() const { return *positions_; }
  std::string name() const;

 private:
  int id_ = 0;
  std::optional<std::vector<Vec2>> positions_;
};

std::vector<Vec2> table_scenario(int id);

struct WorldState {
  std::vector<Vec2> haps_xy;
  std::vector<Vec2> hotspot_xy;
  std::vector<Vec2> hotspot_vel;
  std::vector<std::vector<Vec2>> ue_offsets;  // [hotspot][ue]
  long frame = 0;

  int num_haps() const { return static_cast<int>(haps_xy.size()); }
  int num_hotspots() const { return static_cast<int>(hotspot_xy.size()); }
  Vec2 ue_xy(int hotspot, int ue) const {
    return hotspot_xy[hotspot] + ue_offsets[hotspot][ue];
  }
};

// Hotspot start points and headings. Hotspots starting west of the centre
// head east, the others head west.
std::vector<Vec2> hotspot_starts(const AreaConfig& area);
std::vector<Vec2> hotspot_velocities(const AreaConfig& area);

WorldState init_world(const AreaConfig& area, const Scenario& scenario,
                      RandomStream& rng);

// Reflect a scalar coordinate into [-limit, limit]; returns true when a
// reflection happened.
bool reflect_into(double& x, double limit);

WorldState step_hotspots(const WorldState& world, const AreaConfig& area,
                         double dt);

void validate_action(const Action& a, double r_max);

WorldState step_haps(const WorldState& world, const AreaConfig& area,
                     std::span<const Action> actions,
                     std::span<const Vec2> wind, double dt, double r_max);

}  // namespace haps
