#pragma once

#include <cmath>

#include "haps/types.hpp"

namespace haps::nn {

template <class F>
struct AdamConfig {
  F lr = F(3e-5);
  F beta1 = F(0.9);
  F beta2 = F(0.999);
  F eps = F(1e-8);
};

template <class F>
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, AdamConfig<F> cfg)
      : cfg_(cfg), m_(VX<F>::Zero(n)), v_(VX<F>::Zero(n)) {}

  void step(VX<F>& params, const VX<F>& grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (F(1) - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (F(1) - cfg_.beta2) * grad.cwiseAbs2();
    const F c1 = F(1) - std::pow(cfg_.beta1, F(t_));
    const F c2 = F(1) - std::pow(cfg_.beta2, F(t_));
    params.array() -= cfg_.lr * (m_.array() / c1) /
                      ((v_.array() / c2).sqrt() + cfg_.eps);
  }

  long steps() const { return t_; }
  const AdamConfig<F>& config() const { return cfg_; }

 private:
  AdamConfig<F> cfg_;
  VX<F> m_, v_;
  long t_ = 0;
};

// Rescales `grad` in place so its L2 norm is at most `max_norm`; returns the
// norm before clipping.
template <class F>
F clip_grad_norm(VX<F>& grad, F max_norm) {
  const F norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace haps::nn
