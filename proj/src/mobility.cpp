#include "haps/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace haps {

void AreaConfig::validate() const {
  if (!(hotspot_radius > 0.0 && half_extent > hotspot_radius))
    throw std::invalid_argument(
        "area: need half_extent > hotspot_radius > 0");
  if (num_haps < 1) throw std::invalid_argument("area.num_haps must be >= 1");
  if (ues_per_hotspot < 1)
    throw std::invalid_argument("area.ues_per_hotspot must be >= 1");
  if (!(haps_altitude > ue_altitude))
    throw std::invalid_argument("area: HAPS must fly above the UEs");
}

Scenario Scenario::random() { return Scenario{}; }

Scenario Scenario::preset(int id) {
  Scenario s;
  s.positions_ = table_scenario(id);
  s.id_ = id;
  return s;
}

Scenario Scenario::custom(std::vector<Vec2> haps_xy) {
  Scenario s;
  s.positions_ = std::move(haps_xy);
  return s;
}

Scenario Scenario::parse(const std::string& text) {
  if (text == "random") return random();
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '4')
    return preset(text[0] - '0');
  throw std::invalid_argument("scenario must be 1..4 or \"random\", got \"" +
                              text + "\"");
}

std::string Scenario::name() const {
  if (is_random()) return "random";
  if (id_ > 0) return std::to_string(id_);
  return "custom";
}

std::vector<Vec2> table_scenario(int id) {
  switch (id) {
    case 1: return {{-250, -450}, {450, 0}, {-250, 450}};
    case 2: return {{-450, 450}, {-100, 0}, {-450, -450}};
    case 3: return {{-450, 200}, {100, 100}, {-450, -200}};
    case 4: return {{0, 0}, {0, 0}, {0, 0}};
    default:
      throw std::invalid_argument("unknown scenario id " + std::to_string(id));
  }
}

std::vector<Vec2> hotspot_starts(const AreaConfig& area) {
  if (area.num_haps == 3) return {{-550, -550}, {550, 0}, {-550, 550}};
  // Other layouts: evenly spaced rows, alternating sides.
  std::vector<Vec2> out;
  const double x0 = 550.0 / 750.0 * area.half_extent;
  for (int h = 0; h < area.num_haps; ++h) {
    const double y = area.num_haps == 1
                         ? 0.0
                         : -x0 + 2.0 * x0 * h / (area.num_haps - 1);
    out.emplace_back(h % 2 == 0 ? -x0 : x0, y);
  }
  return out;
}

std::vector<Vec2> hotspot_velocities(const AreaConfig& area) {
  std::vector<Vec2> out;
  for (const auto& p : hotspot_starts(area))
    out.emplace_back(p.x() < 0 ? area.hotspot_speed : -area.hotspot_speed, 0.0);
  return out;
}

WorldState init_world(const AreaConfig& area, const Scenario& scenario,
                      RandomStream& rng) {
  area.validate();
  WorldState w;
  if (scenario.is_random()) {
    for (int d = 0; d < area.num_haps; ++d) {
      const double x = rng.uniform(-area.half_extent, area.half_extent);
      const double y = rng.uniform(-area.half_extent, area.half_extent);
      w.haps_xy.emplace_back(x, y);
    }
  } else {
    if (static_cast<int>(scenario.positions().size()) != area.num_haps)
      throw std::invalid_argument(
          "scenario lists " + std::to_string(scenario.positions().size()) +
          " HAPS, area has " + std::to_string(area.num_haps));
    w.haps_xy = scenario.positions();
  }
  w.hotspot_xy = hotspot_starts(area);
  w.hotspot_vel = hotspot_velocities(area);
  w.ue_offsets.resize(area.num_haps);
  for (auto& hotspot : w.ue_offsets) {
    hotspot.reserve(area.ues_per_hotspot);
    for (int n = 0; n < area.ues_per_hotspot; ++n) {
      // Uniform in the disc.
      const double r = area.hotspot_radius * std::sqrt(rng.uniform());
      const double phi = rng.uniform(-kPi, kPi);
      hotspot.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
  }
  return w;
}

bool reflect_into(double& x, double limit) {
  if (x > limit) {
    x = 2.0 * limit - x;
    return true;
  }
  if (x < -limit) {
    x = -2.0 * limit - x;
    return true;
  }
  return false;
}

WorldState step_hotspots(const WorldState& world, const AreaConfig& area,
                         double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_hotspots: dt must be > 0");
  WorldState next = world;
  for (int h = 0; h < next.num_hotspots(); ++h) {
    Vec2& p = next.hotspot_xy[h];
    Vec2& v = next.hotspot_vel[h];
    p += v * dt;
    for (int axis = 0; axis < 2; ++axis)
      if (reflect_into(p[axis], area.half_extent)) v[axis] = -v[axis];
  }
  return next;
}

void validate_action(const Action& a, double r_max) {
  if (!(a.angle >= -kPi && a.angle < kPi))
    throw std::invalid_argument("action angle outside [-pi, pi)");
  if (!(a.distance >= 0.0 && a.distance <= r_max))
    throw std::invalid_argument("action distance outside [0, r_max]");
}

WorldState step_haps(const WorldState& world, const AreaConfig& area,
                     std::span<const Action> actions,
                     std::span<const Vec2> wind, double dt, double r_max) {
  const auto n = world.haps_xy.size();
  if (actions.size() != n || wind.size() != n)
    throw std::invalid_argument("step_haps: one action and wind per HAPS");
  WorldState next = world;
  for (std::size_t d = 0; d < n; ++d) {
    validate_action(actions[d], r_max);
    const Vec2 command{actions[d].distance * std::cos(actions[d].angle),
                       actions[d].distance * std::sin(actions[d].angle)};
    Vec2 p = world.haps_xy[d] + command + wind[d] * dt;
    p = p.cwiseMax(-area.half_extent).cwiseMin(area.half_extent);
    next.haps_xy[d] = p;
  }
  return next;
}

}  // namespace haps
