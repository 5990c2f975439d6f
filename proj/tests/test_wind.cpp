#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "haps/wind.hpp"

using namespace haps;

TEST_CASE("slow variation follows the sinusoid along the mean direction") {
  WindConfig cfg;
  CHECK(slow_variation(cfg, 0).norm() == 0.0);
  const Vec2 quarter = slow_variation(cfg, 32);
  CHECK(quarter.x() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quarter.y() == 0.0);
  CHECK(slow_variation(cfg, 64).norm() < 1e-12);

  cfg.mean_direction = kPi / 2;
  const Vec2 north = slow_variation(cfg, 32);
  CHECK(std::abs(north.x()) < 1e-15);
  CHECK(north.y() == doctest::Approx(1.0));
}

TEST_CASE("AR(1) step") {
  WindConfig cfg;
  CHECK(ar1_step(Vec2::Zero(), cfg, Vec2::Zero()).norm() == 0.0);
  const Vec2 decayed = ar1_step(Vec2(1.0, 0.0), cfg, Vec2::Zero());
  CHECK(decayed.x() == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(decayed.y() == 0.0);

  // Innovation scale sigma * sqrt(1 - rho^2).
  const Vec2 kicked = ar1_step(Vec2::Zero(), cfg, Vec2(1.0, -1.0));
  CHECK(kicked.x() == doctest::Approx(2.0 * std::sqrt(1.0 - 0.95 * 0.95)));
  CHECK(kicked.y() == doctest::Approx(-2.0 * std::sqrt(1.0 - 0.95 * 0.95)));

  WindState s{{Vec2(1.0, 0.0)}, 3};
  const std::vector<Vec2> zero{Vec2::Zero()};
  const WindState next = ar1_step(s, cfg, zero);
  CHECK(next.frame_index == 4);
}

TEST_CASE("zero innovations decay the residual geometrically") {
  WindConfig cfg;
  WindState s{{Vec2(3.0, -4.0)}, 0};
  const std::vector<Vec2> zero{Vec2::Zero()};
  for (int t = 1; t <= 40; ++t) {
    s = ar1_step(s, cfg, zero);
    CHECK(s.residual[0].norm() == doctest::Approx(std::pow(0.95, t) * 5.0).epsilon(1e-12));
  }
}

TEST_CASE("wind velocity is the sum of its three terms") {
  WindConfig cfg;
  cfg.residual_std = 0.0;
  cfg.slow_amplitude = 0.0;
  RandomStream rng(1);
  WindState s = init_wind(cfg, 3, rng);
  for (int t = 0; t < 50; ++t) {
    const Vec2 w = wind_velocity(s, cfg);
    CHECK(w.x() == doctest::Approx(4.0));
    CHECK(w.y() == doctest::Approx(0.0));
    s = advance_wind(s, cfg, rng);
  }

  WindConfig defaults;
  WindState at32{{Vec2::Zero()}, 32};
  CHECK(wind_velocity(at32, defaults).x() == doctest::Approx(5.0));
  CHECK(wind_velocity(at32, defaults).y() == doctest::Approx(0.0));

  WindConfig residual_only;
  residual_only.mean_speed = 0.0;
  residual_only.slow_amplitude = 0.0;
  WindState r{{Vec2(0.3, -1.7)}, 17};
  CHECK(wind_velocity(r, residual_only) == Vec2(0.3, -1.7));
}

TEST_CASE("long-run AR(1) statistics") {
  // Monte-Carlo oracle: sample std and lag-1 autocorrelation of the residual.
  WindConfig cfg;
  RandomStream rng(2024);
  WindState s = init_wind(cfg, 1, rng);
  const int n = 1000000;
  Vec2 sum = Vec2::Zero(), sum2 = Vec2::Zero(), lag = Vec2::Zero();
  Vec2 prev = s.residual[0];
  for (int i = 0; i < n; ++i) {
    s = advance_wind(s, cfg, rng);
    const Vec2 x = s.residual[0];
    sum += x;
    sum2 += x.cwiseProduct(x);
    lag += x.cwiseProduct(prev);
    prev = x;
  }
  for (int axis = 0; axis < 2; ++axis) {
    const double mean = sum[axis] / n;
    const double var = sum2[axis] / n - mean * mean;
    CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.025));
    CHECK(std::abs((lag[axis] / n - mean * mean) / var - 0.95) < 0.02);
  }
}

TEST_CASE("per-HAPS residuals are independent when the field is not shared") {
  WindConfig cfg;
  cfg.shared_field = false;
  RandomStream rng(5);
  WindState s = init_wind(cfg, 3, rng);
  REQUIRE(s.residual.size() == 3);
  s = advance_wind(s, cfg, rng);
  CHECK(wind_velocity(s, cfg, 0) != wind_velocity(s, cfg, 1));

  WindConfig shared;
  WindState one = init_wind(shared, 3, rng);
  REQUIRE(one.residual.size() == 1);
  CHECK(wind_velocity(one, shared, 0) == wind_velocity(one, shared, 2));
}

TEST_CASE("identical seeds give bit-identical trajectories") {
  WindConfig cfg;
  RandomStream a(77), b(77);
  WindState sa = init_wind(cfg, 1, a), sb = init_wind(cfg, 1, b);
  for (int i = 0; i < 1000; ++i) {
    sa = advance_wind(sa, cfg, a);
    sb = advance_wind(sb, cfg, b);
    REQUIRE(wind_velocity(sa, cfg) == wind_velocity(sb, cfg));
  }
}

TEST_CASE("config validation") {
  WindConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.temporal_rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = WindConfig{};
  cfg.residual_std = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = WindConfig{};
  cfg.slow_period = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = WindConfig{};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
