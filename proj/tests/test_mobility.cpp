#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "haps/mobility.hpp"

using namespace haps;

TEST_CASE("scenario presets") {
  AreaConfig area;
  RandomStream rng(1);
  const WorldState w1 = init_world(area, Scenario::preset(1), rng);
  CHECK(w1.haps_xy[0] == Vec2(-250, -450));
  CHECK(w1.haps_xy[1] == Vec2(450, 0));
  CHECK(w1.haps_xy[2] == Vec2(-250, 450));
  const WorldState w4 = init_world(area, Scenario::preset(4), rng);
  for (const auto& p : w4.haps_xy) CHECK(p == Vec2(0, 0));
  CHECK(table_scenario(2)[1] == Vec2(-100, 0));
  CHECK(table_scenario(3)[2] == Vec2(-450, -200));
  CHECK_THROWS_AS(table_scenario(5), std::invalid_argument);
  CHECK_THROWS_AS(Scenario::parse("0"), std::invalid_argument);
  CHECK(Scenario::parse("random").is_random());
  CHECK(Scenario::parse("3").id() == 3);
}

TEST_CASE("hotspots start at the scenario points heading across the area") {
  AreaConfig area;
  RandomStream rng(1);
  const WorldState w = init_world(area, Scenario::preset(1), rng);
  CHECK(w.hotspot_xy[0] == Vec2(-550, -550));
  CHECK(w.hotspot_xy[1] == Vec2(550, 0));
  CHECK(w.hotspot_xy[2] == Vec2(-550, 550));
  CHECK(w.hotspot_vel[0] == Vec2(10, 0));
  CHECK(w.hotspot_vel[1] == Vec2(-10, 0));
  CHECK(w.hotspot_vel[2] == Vec2(10, 0));
}

TEST_CASE("scenario length must match the HAPS count") {
  AreaConfig area;
  RandomStream rng(1);
  CHECK_THROWS_AS(init_world(area, Scenario::custom({{0, 0}, {1, 1}}), rng),
                  std::invalid_argument);
}

TEST_CASE("UE offsets lie in the hotspot disc for any seed") {
  AreaConfig area;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed);
    const WorldState w = init_world(area, Scenario::random(), rng);
    int count = 0;
    for (const auto& hotspot : w.ue_offsets)
      for (const auto& o : hotspot) {
        CHECK(o.norm() <= 50.0);
        ++count;
      }
    CHECK(count == 30);
    for (const auto& p : w.haps_xy) CHECK(p.cwiseAbs().maxCoeff() <= 750.0);
  }
}

TEST_CASE("hotspot motion reflects at the boundary") {
  AreaConfig area;
  RandomStream rng(3);
  WorldState w = init_world(area, Scenario::preset(1), rng);
  w.hotspot_xy[0] = Vec2(740, 0);
  w.hotspot_vel[0] = Vec2(10, 0);
  w.hotspot_xy[1] = Vec2(0, 0);
  w.hotspot_vel[1] = Vec2(10, 0);
  const WorldState n = step_hotspots(w, area, 2.0);
  CHECK(n.hotspot_xy[0].x() == doctest::Approx(740.0));
  CHECK(n.hotspot_vel[0] == Vec2(-10, 0));
  CHECK(n.hotspot_xy[1] == Vec2(20, 0));
  CHECK(n.hotspot_vel[1] == Vec2(10, 0));

  // UEs ride rigidly with their centroid.
  for (int h = 0; h < 3; ++h)
    for (int u = 0; u < 10; ++u)
      CHECK(n.ue_xy(h, u) == n.hotspot_xy[h] + w.ue_offsets[h][u]);
  CHECK_THROWS_AS(step_hotspots(w, area, 0.0), std::invalid_argument);
}

TEST_CASE("two reflections return the centroid to its original track") {
  // Narrow area: a hotspot bouncing between walls repeats its path.
  AreaConfig area;
  area.half_extent = 100.0;
  area.hotspot_radius = 10.0;
  RandomStream rng(3);
  WorldState w = init_world(area, Scenario::preset(4), rng);
  w.hotspot_xy[0] = Vec2(95, 0);
  w.hotspot_vel[0] = Vec2(10, 0);
  const Vec2 start = w.hotspot_xy[0];
  // Period of the bounce: 4 * half_extent / speed = 40 s = 20 frames.
  for (int i = 0; i < 20; ++i) w = step_hotspots(w, area, 2.0);
  CHECK(w.hotspot_xy[0].x() == doctest::Approx(start.x()));
  CHECK(w.hotspot_vel[0] == Vec2(10, 0));
}

TEST_CASE("hotspots stay inside the area under long runs") {
  AreaConfig area;
  RandomStream rng(9);
  WorldState w = init_world(area, Scenario::random(), rng);
  for (auto& v : w.hotspot_vel) v = Vec2(rng.uniform(-400, 400), rng.uniform(-400, 400));
  for (int i = 0; i < 2000; ++i) {
    w = step_hotspots(w, area, 2.0);
    for (const auto& p : w.hotspot_xy) REQUIRE(p.cwiseAbs().maxCoeff() <= 750.0);
  }
}

TEST_CASE("HAPS displacement: command plus wind drift") {
  AreaConfig area;
  RandomStream rng(1);
  const WorldState w = init_world(area, Scenario::preset(4), rng);
  const std::vector<Vec2> wind(3, Vec2(4, 0)), calm(3, Vec2::Zero());

  const std::vector<Action> idle(3, Action{0.0, 0.0});
  WorldState n = step_haps(w, area, idle, wind, 2.0, 50.0);
  CHECK(n.haps_xy[0] == Vec2(8, 0));

  const std::vector<Action> north(3, Action{kPi / 2, 10.0});
  n = step_haps(w, area, north, calm, 2.0, 50.0);
  CHECK(std::abs(n.haps_xy[0].x()) < 1e-9);
  CHECK(n.haps_xy[0].y() == doctest::Approx(10.0));

  const std::vector<Action> cancel(3, Action{-kPi, 8.0});
  n = step_haps(w, area, cancel, wind, 2.0, 50.0);
  CHECK(n.haps_xy[0].norm() < 1e-9);

  n = step_haps(w, area, idle, calm, 2.0, 50.0);
  CHECK(n.haps_xy == w.haps_xy);
}

TEST_CASE("HAPS are clamped to the area and bad actions are rejected") {
  AreaConfig area;
  RandomStream rng(1);
  WorldState w = init_world(area, Scenario::preset(1), rng);
  w.haps_xy[0] = Vec2(745, -745);
  const std::vector<Action> out(3, Action{-kPi / 4, 50.0});
  const std::vector<Vec2> calm(3, Vec2::Zero());
  const WorldState n = step_haps(w, area, out, calm, 2.0, 50.0);
  CHECK(n.haps_xy[0] == Vec2(750, -750));

  std::vector<Action> bad(3);
  bad[1] = Action{kPi, 1.0};
  CHECK_THROWS_AS(step_haps(w, area, bad, calm, 2.0, 50.0), std::invalid_argument);
  bad[1] = Action{0.0, 50.1};
  CHECK_THROWS_AS(step_haps(w, area, bad, calm, 2.0, 50.0), std::invalid_argument);
  bad[1] = Action{0.0, -0.1};
  CHECK_THROWS_AS(step_haps(w, area, bad, calm, 2.0, 50.0), std::invalid_argument);
}

TEST_CASE("random walks keep every HAPS inside the area") {
  AreaConfig area;
  RandomStream rng(4);
  WorldState w = init_world(area, Scenario::random(), rng);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Action> a(3);
    std::vector<Vec2> wind(3);
    for (int d = 0; d < 3; ++d) {
      a[d] = Action{rng.uniform(-kPi, kPi), rng.uniform(0, 50)};
      wind[d] = 10.0 * rng.gaussian2();
    }
    w = step_haps(w, area, a, wind, 2.0, 50.0);
    for (const auto& p : w.haps_xy) REQUIRE(p.cwiseAbs().maxCoeff() <= 750.0);
  }
}
