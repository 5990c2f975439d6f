#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "haps/env.hpp"

using namespace haps;

namespace {

std::vector<Action> hold(int d) { return std::vector<Action>(d, Action{0.0, 0.0}); }

EnvConfig calm() {
  EnvConfig cfg;
  cfg.wind.mean_speed = 0.0;
  cfg.wind.residual_std = 0.0;
  cfg.wind.slow_amplitude = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("reset places HAPS at the preset coordinates") {
  HapsEnv env(EnvConfig{});
  const Observation o4 = env.reset(Scenario::preset(4), 1);
  for (int d = 0; d < 3; ++d) {
    CHECK(o4.raw[6 * d + 0] == 0.0);
    CHECK(o4.raw[6 * d + 1] == 0.0);
    CHECK(o4.raw[6 * d + 2] == 20000.0);
  }
  const Observation o1 = env.reset(Scenario::preset(1), 1);
  CHECK(o1.raw[0] == -250.0);
  CHECK(o1.raw[1] == -450.0);
  CHECK(o1.raw[2] == 20000.0);
  CHECK(o1.normalized[0] == doctest::Approx(-250.0 / 750.0));
  CHECK(o1.normalized[1] == doctest::Approx(-450.0 / 750.0));
}

TEST_CASE("reset and step are deterministic in the seed") {
  HapsEnv a(EnvConfig{}), b(EnvConfig{});
  const Observation oa = a.reset(Scenario::random(), 77);
  const Observation ob = b.reset(Scenario::random(), 77);
  CHECK((oa.raw.array() == ob.raw.array()).all());
  const std::vector<Action> act{{0.5, 20.0}, {-2.0, 50.0}, {3.0, 0.0}};
  for (int t = 0; t < 20; ++t) {
    const StepResult ra = a.step(act);
    const StepResult rb = b.step(act);
    CHECK(ra.reward == rb.reward);
    CHECK((ra.observation.normalized.array() == rb.observation.normalized.array()).all());
  }
  HapsEnv c(EnvConfig{});
  const Observation oc = c.reset(Scenario::random(), 78);
  CHECK((oc.raw.array() != oa.raw.array()).any());
}

TEST_CASE("sigmoid reward") {
  RewardConfig cfg;
  CHECK(sigmoid_reward(50.0, cfg) == 0.5);
  CHECK(std::abs(sigmoid_reward(54.0, cfg) - 0.7311) < 1e-4);
  CHECK(sigmoid_reward(54.0, cfg) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(sigmoid_reward(1e6, cfg) == doctest::Approx(1.0));
  CHECK(sigmoid_reward(-1e6, cfg) == doctest::Approx(0.0).scale(1));
  double prev = 0.0;
  for (double f = -100.0; f <= 150.0; f += 0.5) {
    const double r = sigmoid_reward(f, cfg);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("episodes last exactly the configured number of frames") {
  HapsEnv env(EnvConfig{});
  CHECK_THROWS(env.step(hold(3)));
  env.reset(Scenario::preset(2), 5);
  CHECK_THROWS(env.step(hold(2)));
  int steps = 0;
  for (;;) {
    const StepResult r = env.step(hold(3));
    ++steps;
    CHECK(r.reward > 0.0);
    CHECK(r.reward < 1.0);
    CHECK(r.observation.size() == 18);
    CHECK(r.observation.normalized.allFinite());
    CHECK((r.observation.normalized.array().abs() <= 1.0).all());
    CHECK(r.done == (steps == 128));
    if (r.done) break;
  }
  CHECK(steps == 128);
  CHECK(env.done());
  CHECK_THROWS(env.step(hold(3)));
}

TEST_CASE("observation dimension scales with memory") {
  for (int m : {1, 2, 4}) {
    EnvConfig cfg;
    cfg.observation.memory = m;
    HapsEnv env(cfg);
    CHECK(env.observation_size() == 6 * 3 * m);
    CHECK(env.reset(Scenario::preset(1), 1).size() == 18 * m);
    for (int t = 0; t < 5; ++t) CHECK(env.step(hold(3)).observation.size() == 18 * m);
  }
}

TEST_CASE("zero action with zero wind keeps HAPS in place") {
  HapsEnv env(calm());
  const Observation o0 = env.reset(Scenario::preset(1), 3);
  while (!env.done()) {
    const StepResult r = env.step(hold(3));
    for (int d = 0; d < 3; ++d) {
      CHECK(r.observation.raw[6 * d] == o0.raw[6 * d]);
      CHECK(r.observation.raw[6 * d + 1] == o0.raw[6 * d + 1]);
      CHECK(r.observation.raw[6 * d + 2] == o0.raw[6 * d + 2]);
    }
  }
}

TEST_CASE("actions and wind move the HAPS") {
  HapsEnv env(calm());
  env.reset(Scenario::preset(4), 3);
  const std::vector<Action> north{{kPi / 2, 50.0}, {kPi / 2, 50.0}, {kPi / 2, 50.0}};
  env.step(north);
  CHECK(env.world().haps_xy[0].x() == doctest::Approx(0.0).scale(1));
  CHECK(env.world().haps_xy[0].y() == doctest::Approx(50.0));

  EnvConfig windy = calm();
  windy.wind.mean_speed = 4.0;
  HapsEnv drift(windy);
  drift.reset(Scenario::preset(4), 3);
  drift.step(hold(3));
  CHECK(drift.world().haps_xy[1].x() == doctest::Approx(8.0));
  CHECK(drift.current_wind(1).x() == doctest::Approx(4.0));
  CHECK(drift.expected_next_wind(1).x() == doctest::Approx(4.0));
}

TEST_CASE("observe") {
  AreaConfig area;
  ObservationConfig cfg;
  WorldState w;
  w.haps_xy = {Vec2(375, -750), Vec2(0, 0), Vec2(-750, 150)};
  MatX sinr = MatX::Constant(10, 3, 100.0);  // 20 dB
  MatX angle = MatX::Constant(10, 3, 0.3);
  sinr(0, 2) = 1e9;                           // clipped at the top
  const FrameFeatures f = observe(w, area, sinr, angle, cfg);
  CHECK(f.raw.size() == 18);
  CHECK(f.normalized.size() == 18);
  CHECK(f.raw[3] == doctest::Approx(20.0));
  CHECK(f.raw[4] == doctest::Approx(0.3));
  CHECK(f.raw[5] == doctest::Approx(0.0).scale(1));
  CHECK(f.normalized[0] == doctest::Approx(0.5));
  CHECK(f.normalized[1] == doctest::Approx(-1.0));
  CHECK(f.normalized[2] == doctest::Approx(0.0));  // 20 dB is the window midpoint
  CHECK(f.normalized[3] == doctest::Approx(std::sin(0.3)));
  CHECK(f.normalized[4] == doctest::Approx(std::cos(0.3)));
  CHECK(f.normalized[5] == doctest::Approx(-1.0));
  CHECK(f.raw[15] == doctest::Approx((9.0 * 20.0 + 90.0) / 10.0));

  const double deg = kPi / 180.0;
  angle.col(1).setConstant(179 * deg);
  angle.block(0, 1, 5, 1).setConstant(-179 * deg);
  const FrameFeatures g = observe(w, area, sinr, angle, cfg);
  CHECK(std::abs(std::abs(g.raw[10]) - kPi) < 1e-9);
  CHECK(g.raw[11] < 2.0 * deg);
  CHECK(g.normalized[10] == doctest::Approx(-1.0));

  MatX dead = MatX::Zero(10, 3);
  const FrameFeatures z = observe(w, area, dead, angle, cfg);
  CHECK(z.normalized.allFinite());
  CHECK(z.normalized[2] == -1.0);
}

TEST_CASE("observation blocks permute with the HAPS") {
  AreaConfig area;
  ObservationConfig cfg;
  RandomStream rng(4);
  WorldState w = init_world(area, Scenario::random(), rng);
  MatX sinr(10, 3), angle(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int h = 0; h < 3; ++h) {
      sinr(i, h) = std::exp(rng.uniform(-3.0, 8.0));
      angle(i, h) = rng.uniform(-kPi, kPi);
    }
  const int perm[3] = {2, 0, 1};
  WorldState p = w;
  MatX ps(10, 3), pa(10, 3);
  for (int h = 0; h < 3; ++h) {
    p.haps_xy[h] = w.haps_xy[perm[h]];
    p.hotspot_xy[h] = w.hotspot_xy[perm[h]];
    p.hotspot_vel[h] = w.hotspot_vel[perm[h]];
    p.ue_offsets[h] = w.ue_offsets[perm[h]];
    ps.col(h) = sinr.col(perm[h]);
    pa.col(h) = angle.col(perm[h]);
  }
  const FrameFeatures a = observe(w, area, sinr, angle, cfg);
  const FrameFeatures b = observe(p, area, ps, pa, cfg);
  for (int h = 0; h < 3; ++h)
    for (int j = 0; j < 6; ++j) {
      CHECK(b.raw[6 * h + j] == a.raw[6 * perm[h] + j]);
      CHECK(b.normalized[6 * h + j] == a.normalized[6 * perm[h] + j]);
    }
}

TEST_CASE("trace export") {
  HapsEnv env(EnvConfig{});
  env.set_trace(true);
  env.reset(Scenario::preset(3), 9);
  for (int t = 0; t < 4; ++t) env.step(hold(3));
  CHECK(env.trace().size() >= 4);
  std::ostringstream os;
  write_trace(os, env.trace());
  const std::string text = os.str();
  CHECK(text.rfind("frame,", 0) == 0);
  int lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == static_cast<int>(env.trace().size()) + 1);
}

TEST_CASE("invalid configurations are rejected") {
  EnvConfig cfg;
  cfg.episode.frames_per_episode = 0;
  CHECK_THROWS(HapsEnv{cfg});
  EnvConfig mismatched;
  mismatched.episode.dt = 1.0;
  CHECK_THROWS(HapsEnv{mismatched});
}
