#pragma once

#include <cmath>
#include <vector>

#include "haps/types.hpp"

namespace haps::nn {

// Diagonal Gaussian pushed through tanh and an affine map
// a = offset + scale * tanh(x).

template <class F>
F log_sqrt_2pi() {
  return F(0.5) * std::log(F(2) * F(kPi));
}

// log(1 - tanh(x)^2), stable for large |x|.
template <class F>
F log1m_tanh2(F x) {
  const F ax = std::abs(x);
  return F(2) * (std::log(F(2)) - ax - std::log1p(std::exp(F(-2) * ax)));
}

template <class F>
F gaussian_log_prob(const VX<F>& x, const VX<F>& mean, const VX<F>& log_std) {
  const VX<F> z = (x - mean).cwiseQuotient(log_std.array().exp().matrix());
  return -F(0.5) * z.squaredNorm() - log_std.sum() -
         F(x.size()) * log_sqrt_2pi<F>();
}

// Density of the squashed action (w.r.t. Lebesgue measure on the action box),
// evaluated at the pre-squash sample x.
template <class F>
F squashed_log_prob(const VX<F>& x, const VX<F>& mean, const VX<F>& log_std,
                    const VX<F>& scale) {
  F lp = gaussian_log_prob(x, mean, log_std);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    lp -= log1m_tanh2(x[i]) + std::log(scale[i]);
  return lp;
}

template <class F>
VX<F> squash(const VX<F>& x, const VX<F>& offset, const VX<F>& scale) {
  return offset + scale.cwiseProduct(x.array().tanh().matrix());
}

// Probabilists' Gauss-Hermite rule (Golub-Welsch): E[g(Z)], Z ~ N(0,1),
// is approximated by sum_i w_i g(z_i).
template <class F>
struct GaussHermite {
  VX<F> nodes;
  VX<F> weights;

  explicit GaussHermite(int n) {
    MX<F> jacobi = MX<F>::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      jacobi(i, i - 1) = std::sqrt(F(i));
      jacobi(i - 1, i) = std::sqrt(F(i));
    }
    Eigen::SelfAdjointEigenSolver<MX<F>> es(jacobi);
    nodes = es.eigenvalues();
    weights = es.eigenvectors().row(0).transpose().cwiseAbs2();
  }

  static const GaussHermite& standard() {
    static const GaussHermite rule(32);
    return rule;
  }
};

template <class F>
struct EntropyTerm {
  F value = F(0);
  F d_mean = F(0);
  F d_log_std = F(0);
};

// Entropy of offset + scale * tanh(X), X ~ N(mean, exp(log_std)^2):
// H = H_gauss + E[log(1 - tanh(X)^2)] + log(scale), with the expectation
// taken by Gauss-Hermite quadrature. Derivatives are of the quadrature
// formula.
template <class F>
EntropyTerm<F> gaussian_entropy_1d(F log_std) {
  return {log_std + F(0.5) + log_sqrt_2pi<F>(), F(0), F(1)};
}

template <class F>
EntropyTerm<F> squashed_entropy_1d(F mean, F log_std, F scale) {
  const auto& gh = GaussHermite<F>::standard();
  const F sigma = std::exp(log_std);
  EntropyTerm<F> out;
  out.value = log_std + F(0.5) + log_sqrt_2pi<F>() + std::log(scale);
  out.d_log_std = F(1);
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
    const F x = mean + sigma * gh.nodes[i];
    const F t = std::tanh(x);
    out.value += gh.weights[i] * log1m_tanh2(x);
    out.d_mean += gh.weights[i] * (F(-2) * t);
    out.d_log_std += gh.weights[i] * (F(-2) * t * sigma * gh.nodes[i]);
  }
  return out;
}

}  // namespace haps::nn
