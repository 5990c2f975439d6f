#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "haps/types.hpp"

namespace haps::nn {

template <class F>
struct Advantages {
  VX<F> advantages;
  VX<F> returns;  // advantages + values
};

// Generalized advantage estimation. dones[t] != 0 marks the last step of an
// episode (next value taken as 0); `bootstrap` is V(s_T) for a trajectory cut
// mid-episode.
template <class F>
Advantages<F> gae(std::span<const F> rewards, std::span<const F> values,
                  std::span<const std::uint8_t> dones, F bootstrap, F gamma,
                  F lambda) {
  const auto n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("gae: sequences must have equal length");
  Advantages<F> out{VX<F>(n), VX<F>(n)};
  F running = F(0);
  for (std::size_t i = n; i-- > 0;) {
    const F next_value = i + 1 < n ? values[i + 1] : bootstrap;
    const F live = dones[i] ? F(0) : F(1);
    const F delta = rewards[i] + gamma * next_value * live - values[i];
    running = delta + gamma * lambda * live * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

// A_t = r_t - V(s_t), no bootstrapping.
template <class F>
Advantages<F> one_step_advantages(std::span<const F> rewards,
                                  std::span<const F> values) {
  if (values.size() != rewards.size())
    throw std::invalid_argument("advantages: sequences must have equal length");
  Advantages<F> out{VX<F>(rewards.size()), VX<F>(rewards.size())};
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out.advantages[i] = rewards[i] - values[i];
    out.returns[i] = rewards[i];
  }
  return out;
}

template <class F>
void normalize_in_place(VX<F>& v, F eps = F(1e-8)) {
  if (v.size() < 2) return;
  const F mean = v.mean();
  const F var = (v.array() - mean).square().sum() / F(v.size());
  v = ((v.array() - mean) / (std::sqrt(var) + eps)).matrix();
}

}  // namespace haps::nn
