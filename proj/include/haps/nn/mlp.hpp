#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "haps/types.hpp"

namespace haps::nn {

enum class Activation { Tanh, Silu };

inline Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "silu") return Activation::Silu;
  throw std::invalid_argument("unknown activation \"" + s + "\"");
}

inline const char* activation_name(Activation a) {
  return a == Activation::Tanh ? "tanh" : "silu";
}

template <class F>
struct DenseLayer {
  MX<F> weight;  // out x in
  VX<F> bias;
};

// Fully connected network with a linear output layer. Batches are stored
// column-wise: an input of shape (in, B) produces (out, B).
template <class F>
class Mlp {
 public:
  struct Tape {
    std::vector<MX<F>> pre;   // pre-activations per layer
    std::vector<MX<F>> post;  // post[0] is the input
  };

  Mlp() = default;
  Mlp(const std::vector<int>& sizes, Activation act) : act_(act) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp needs >= 2 sizes");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      if (sizes[l] < 1 || sizes[l + 1] < 1)
        throw std::invalid_argument("Mlp widths must be >= 1");
      layers_.push_back({MX<F>::Zero(sizes[l + 1], sizes[l]),
                         VX<F>::Zero(sizes[l + 1])});
    }
  }

  // Orthogonal weights scaled by `hidden_gain` (last layer `output_gain`),
  // zero biases.
  void init_orthogonal(RandomStream& rng, F hidden_gain, F output_gain) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      auto& w = layers_[l].weight;
      const Eigen::Index rows = w.rows(), cols = w.cols();
      const Eigen::Index n = std::max(rows, cols);
      MX<F> g(n, n);
      for (Eigen::Index i = 0; i < g.size(); ++i)
        g.data()[i] = static_cast<F>(rng.gaussian());
      Eigen::HouseholderQR<MX<F>> qr(g);
      MX<F> q = qr.householderQ();
      // Sign fix keeps the distribution uniform over orthogonal matrices.
      const VX<F> diag = qr.matrixQR().diagonal();
      for (Eigen::Index j = 0; j < n; ++j)
        if (diag[j] < F(0)) q.col(j) = -q.col(j);
      const F gain = l + 1 == layers_.size() ? output_gain : hidden_gain;
      w = gain * q.topLeftCorner(rows, cols);
      layers_[l].bias.setZero();
    }
  }

  int input_size() const { return static_cast<int>(layers_.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().weight.rows()); }
  Activation activation() const { return act_; }
  std::vector<DenseLayer<F>>& layers() { return layers_; }
  const std::vector<DenseLayer<F>>& layers() const { return layers_; }

  MX<F> forward(const MX<F>& x, Tape* tape = nullptr) const {
    if (x.rows() != input_size())
      throw std::invalid_argument("Mlp input has " + std::to_string(x.rows()) +
                                  " rows, expected " +
                                  std::to_string(input_size()));
    MX<F> h = x;
    if (tape) {
      tape->pre.clear();
      tape->post.clear();
      tape->post.push_back(h);
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      MX<F> z = layers_[l].weight * h;
      z.colwise() += layers_[l].bias;
      const bool last = l + 1 == layers_.size();
      h = last ? z : activate(z);
      if (tape) {
        tape->pre.push_back(std::move(z));
        tape->post.push_back(h);
      }
    }
    return h;
  }

  // Gradient of sum(d_out .* forward(x)) w.r.t. parameters, in an Mlp of
  // the same shape.
  Mlp backward(const Tape& tape, const MX<F>& d_out) const {
    Mlp grad = *this;
    MX<F> dz = d_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      grad.layers_[l].weight.noalias() = dz * tape.post[l].transpose();
      grad.layers_[l].bias = dz.rowwise().sum();
      if (l == 0) break;
      MX<F> dh = layers_[l].weight.transpose() * dz;
      dz = dh.cwiseProduct(activate_grad(tape.pre[l - 1]));
    }
    return grad;
  }

  Eigen::Index num_params() const {
    Eigen::Index n = 0;
    for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
    return n;
  }

  VX<F> flat() const {
    VX<F> out(num_params());
    Eigen::Index o = 0;
    for (const auto& layer : layers_) {
      out.segment(o, layer.weight.size()) = layer.weight.reshaped();
      o += layer.weight.size();
      out.segment(o, layer.bias.size()) = layer.bias;
      o += layer.bias.size();
    }
    return out;
  }

  void set_flat(const Eigen::Ref<const VX<F>>& p) {
    if (p.size() != num_params())
      throw std::invalid_argument("Mlp::set_flat size mismatch");
    Eigen::Index o = 0;
    for (auto& layer : layers_) {
      layer.weight.reshaped() = p.segment(o, layer.weight.size());
      o += layer.weight.size();
      layer.bias = p.segment(o, layer.bias.size());
      o += layer.bias.size();
    }
  }

 private:
  MX<F> activate(const MX<F>& z) const {
    if (act_ == Activation::Tanh) return z.array().tanh().matrix();
    return (z.array() / (F(1) + (-z.array()).exp())).matrix();
  }

  MX<F> activate_grad(const MX<F>& z) const {
    if (act_ == Activation::Tanh)
      return (F(1) - z.array().tanh().square()).matrix();
    const auto s = F(1) / (F(1) + (-z.array()).exp());
    return (s * (F(1) + z.array() * (F(1) - s))).matrix();
  }

  std::vector<DenseLayer<F>> layers_;
  Activation act_ = Activation::Tanh;
};

}  // namespace haps::nn
