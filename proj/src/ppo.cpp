#include "haps/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "haps/errors.hpp"
#include "haps/nn/gae.hpp"
#include "haps/nn/squashed_gaussian.hpp"

namespace haps {

void NetConfig::validate() const {
  if (hidden_layers < 0) throw std::invalid_argument("net.hidden_layers must be >= 0");
  if (hidden_width < 1) throw std::invalid_argument("net.hidden_width must be >= 1");
  if (!std::isfinite(hidden_gain) || !std::isfinite(policy_output_gain) ||
      !std::isfinite(value_output_gain) || !std::isfinite(log_std_init))
    throw std::invalid_argument("net init values must be finite");
}

void PpoConfig::validate() const {
  if (!(gamma_df > 0.0 && gamma_df <= 1.0))
    throw std::invalid_argument("ppo.gamma_df must be in (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("ppo.gae_lambda must be in [0, 1]");
  if (!(clip_eps > 0.0)) throw std::invalid_argument("ppo.clip_eps must be > 0");
  if (!(lr > 0.0)) throw std::invalid_argument("ppo.lr must be > 0");
  if (!(max_grad_norm > 0.0))
    throw std::invalid_argument("ppo.max_grad_norm must be > 0");
  if (epochs < 1 || minibatch_size < 1 || rollout_frames < 1)
    throw std::invalid_argument("ppo epochs, minibatch and rollout must be >= 1");
}

VecX ActionSpace::offset() const {
  VecX o(size());
  for (int d = 0; d < num_haps; ++d) {
    o[2 * d] = 0.0;
    o[2 * d + 1] = 0.5 * r_max;
  }
  return o;
}

VecX ActionSpace::scale() const {
  VecX s(size());
  for (int d = 0; d < num_haps; ++d) {
    s[2 * d] = kPi;
    s[2 * d + 1] = 0.5 * r_max;
  }
  return s;
}

PolicyParams PolicyParams::make(int obs_dim, const ActionSpace& space,
                                const NetConfig& net, RandomStream& rng) {
  net.validate();
  std::vector<int> actor_sizes{obs_dim};
  std::vector<int> critic_sizes{obs_dim};
  for (int l = 0; l < net.hidden_layers; ++l) {
    actor_sizes.push_back(net.hidden_width);
    critic_sizes.push_back(net.hidden_width);
  }
  actor_sizes.push_back(2 * space.size());
  critic_sizes.push_back(1);
  PolicyParams p{nn::Mlp<double>(actor_sizes, net.activation),
                 nn::Mlp<double>(critic_sizes, net.activation), space};
  p.actor.init_orthogonal(rng, net.hidden_gain, net.policy_output_gain);
  p.critic.init_orthogonal(rng, net.hidden_gain, net.value_output_gain);
  p.actor.layers().back().bias.tail(space.size()).setConstant(net.log_std_init);
  return p;
}

VecX PolicyParams::flat() const {
  VecX out(num_params());
  out << actor.flat(), critic.flat();
  return out;
}

void PolicyParams::set_flat(const VecX& p) {
  if (p.size() != num_params())
    throw std::invalid_argument("PolicyParams::set_flat size mismatch");
  actor.set_flat(p.head(actor.num_params()));
  critic.set_flat(p.tail(critic.num_params()));
}

PolicyOutput policy_forward(const PolicyParams& params, const VecX& obs) {
  const MatX out = params.actor.forward(obs);
  const int a = params.space.size();
  return {out.col(0).head(a),
          out.col(0).tail(a).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax)};
}

double value_forward(const PolicyParams& params, const VecX& obs) {
  return params.critic.forward(obs)(0, 0);
}

std::vector<Action> to_actions(const VecX& squashed, const ActionSpace& space) {
  std::vector<Action> out(space.num_haps);
  for (int d = 0; d < space.num_haps; ++d) {
    double angle = squashed[2 * d];
    if (angle >= kPi) angle = -kPi;
    out[d].angle = std::max(angle, -kPi);
    out[d].distance = std::clamp(squashed[2 * d + 1], 0.0, space.r_max);
  }
  return out;
}

SampledAction sample_action(const PolicyOutput& out, const ActionSpace& space,
                            RandomStream& rng) {
  SampledAction s;
  s.raw.resize(out.mean.size());
  for (Eigen::Index i = 0; i < s.raw.size(); ++i)
    s.raw[i] = out.mean[i] + std::exp(out.log_std[i]) * rng.gaussian();
  s.squashed = nn::squash<double>(s.raw, space.offset(), space.scale());
  s.actions = to_actions(s.squashed, space);
  s.log_prob =
      nn::squashed_log_prob<double>(s.raw, out.mean, out.log_std, space.scale());
  return s;
}

SampledAction mean_action(const PolicyOutput& out, const ActionSpace& space) {
  SampledAction s;
  s.raw = out.mean;
  s.squashed = nn::squash<double>(s.raw, space.offset(), space.scale());
  s.actions = to_actions(s.squashed, space);
  s.log_prob =
      nn::squashed_log_prob<double>(s.raw, out.mean, out.log_std, space.scale());
  return s;
}

double squashed_entropy(const PolicyOutput& out, const ActionSpace& space) {
  const VecX scale = space.scale();
  double h = 0.0;
  for (Eigen::Index i = 0; i < out.mean.size(); ++i)
    h += nn::squashed_entropy_1d(out.mean[i], out.log_std[i], scale[i]).value;
  return h;
}

void RolloutBuffer::add(const VecX& obs, const SampledAction& action,
                        double reward, double value, bool done) {
  if (full()) throw std::logic_error("RolloutBuffer overflow");
  obs_.push_back(obs);
  raw_.push_back(action.raw);
  squashed_.push_back(action.squashed);
  log_probs_.push_back(action.log_prob);
  rewards_.push_back(reward);
  values_.push_back(value);
  dones_.push_back(done ? 1 : 0);
}

void RolloutBuffer::clear() {
  obs_.clear();
  raw_.clear();
  squashed_.clear();
  log_probs_.clear();
  rewards_.clear();
  values_.clear();
  dones_.clear();
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

LossGrad ppo_loss(const PolicyParams& params, const Batch& batch,
                  const PpoConfig& cfg, bool with_grad) {
  const int B = batch.size();
  const int A = params.space.size();
  const VecX scale = params.space.scale();
  const double inv_b = 1.0 / B;

  nn::Mlp<double>::Tape actor_tape, critic_tape;
  const MatX out = params.actor.forward(batch.obs, with_grad ? &actor_tape : nullptr);
  const MatX values = params.critic.forward(batch.obs, with_grad ? &critic_tape : nullptr);

  LossGrad lg;
  MatX d_out = MatX::Zero(2 * A, B);
  MatX d_value(1, B);
  double log_scale = 0.0;
  for (int j = 0; j < A; ++j) log_scale += std::log(scale[j]);

  for (int i = 0; i < B; ++i) {
    double logp = -log_scale;
    double entropy = 0.0;
    for (int j = 0; j < A; ++j) {
      const double ls_raw = out(A + j, i);
      const double ls = std::clamp(ls_raw, kLogStdMin, kLogStdMax);
      const double sigma = std::exp(ls);
      const double x = batch.raw(j, i);
      const double z = (x - out(j, i)) / sigma;
      logp += -0.5 * z * z - ls - nn::log_sqrt_2pi<double>() - nn::log1m_tanh2(x);
      const auto h = cfg.entropy == EntropyMode::Squashed
                         ? nn::squashed_entropy_1d(out(j, i), ls, scale[j])
                         : nn::gaussian_entropy_1d(ls);
      entropy += h.value;
      if (with_grad) {
        // Entropy bonus enters the loss with a minus sign.
        d_out(j, i) = -cfg.entropy_coef * inv_b * h.d_mean;
        d_out(A + j, i) = -cfg.entropy_coef * inv_b * h.d_log_std;
      }
    }
    const double ratio = std::exp(logp - batch.old_log_prob[i]);
    const double adv = batch.advantages[i];
    const double surrogate = clipped_surrogate(ratio, adv, cfg.clip_eps);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    lg.terms.policy -= inv_b * surrogate;
    lg.terms.entropy += inv_b * entropy;
    lg.terms.approx_kl += inv_b * (batch.old_log_prob[i] - logp);
    if (std::abs(ratio - 1.0) > cfg.clip_eps) lg.terms.clip_fraction += inv_b;
    const double verr = values(0, i) - batch.returns[i];
    lg.terms.value += cfg.value_coef * inv_b * verr * verr;

    if (with_grad) {
      // d(surrogate)/d(logp): ratio * A on the unclipped branch, else 0.
      const double d_logp = ratio * adv <= clipped * adv ? -inv_b * ratio * adv : 0.0;
      for (int j = 0; j < A; ++j) {
        const double ls_raw = out(A + j, i);
        const double ls = std::clamp(ls_raw, kLogStdMin, kLogStdMax);
        const double sigma = std::exp(ls);
        const double z = (batch.raw(j, i) - out(j, i)) / sigma;
        d_out(j, i) += d_logp * z / sigma;
        d_out(A + j, i) += d_logp * (z * z - 1.0);
        if (ls_raw < kLogStdMin || ls_raw > kLogStdMax) d_out(A + j, i) = 0.0;
      }
      d_value(0, i) = 2.0 * cfg.value_coef * inv_b * verr;
    }
  }
  lg.terms.total = lg.terms.policy + lg.terms.value - cfg.entropy_coef * lg.terms.entropy;
  if (with_grad) {
    const auto ga = params.actor.backward(actor_tape, d_out);
    const auto gc = params.critic.backward(critic_tape, d_value);
    lg.grad.resize(params.num_params());
    lg.grad << ga.flat(), gc.flat();
  }
  return lg;
}

double grad_check(const PolicyParams& params, const Batch& batch,
                  const PpoConfig& cfg, double step) {
  const VecX analytic = ppo_loss(params, batch, cfg, true).grad;
  PolicyParams probe = params;
  VecX theta = params.flat();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + step;
    probe.set_flat(theta);
    const double up = ppo_loss(probe, batch, cfg, false).terms.total;
    theta[i] = keep - step;
    probe.set_flat(theta);
    const double down = ppo_loss(probe, batch, cfg, false).terms.total;
    theta[i] = keep;
    const double numeric = (up - down) / (2.0 * step);
    const double err = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
    worst = std::max(worst, err);
  }
  return worst;
}

namespace {
enum Stream : std::uint64_t { kInit = 11, kAction = 12, kShuffle = 13 };

nn::AdamConfig<double> adam_config(const PpoConfig& cfg) {
  nn::AdamConfig<double> a;
  a.lr = cfg.lr;
  return a;
}
}  // namespace

PpoAgent::PpoAgent(int obs_dim, const ActionSpace& space, const NetConfig& net,
                   const PpoConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      action_rng_(derive_seed(seed, kAction)),
      shuffle_rng_(derive_seed(seed, kShuffle)) {
  cfg_.validate();
  RandomStream init_rng(derive_seed(seed, kInit));
  params_ = PolicyParams::make(obs_dim, space, net, init_rng);
  adam_ = nn::Adam<double>(params_.num_params(), adam_config(cfg_));
}

PpoAgent::PpoAgent(PolicyParams params, const PpoConfig& cfg, std::uint64_t seed)
    : params_(std::move(params)),
      cfg_(cfg),
      action_rng_(derive_seed(seed, kAction)),
      shuffle_rng_(derive_seed(seed, kShuffle)) {
  cfg_.validate();
  adam_ = nn::Adam<double>(params_.num_params(), adam_config(cfg_));
}

PpoAgent::Step PpoAgent::act(const VecX& obs, bool explore) {
  const PolicyOutput out = policy_forward(params_, obs);
  Step s;
  s.action = explore ? sample_action(out, params_.space, action_rng_)
                     : mean_action(out, params_.space);
  s.value = value_forward(params_, obs);
  return s;
}

UpdateStats PpoAgent::update(RolloutBuffer& buffer, double bootstrap_value) {
  const int n = buffer.size();
  if (n == 0) throw std::logic_error("PpoAgent::update on an empty buffer");
  const std::span<const double> rewards(buffer.rewards());
  const std::span<const double> values(buffer.values());
  nn::Advantages<double> adv =
      cfg_.advantage == AdvantageMode::Gae
          ? nn::gae<double>(rewards, values, buffer.dones(), bootstrap_value,
                            cfg_.gamma_df, cfg_.gae_lambda)
          : nn::one_step_advantages<double>(rewards, values);
  if (cfg_.normalize_advantages) nn::normalize_in_place(adv.advantages);

  const int obs_dim = params_.observation_size();
  const int act_dim = params_.space.size();
  const VecX snapshot = params_.flat();
  VecX theta = snapshot;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  UpdateStats stats;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng_.engine());
    for (int start = 0; start < n; start += cfg_.minibatch_size) {
      const int b = std::min(cfg_.minibatch_size, n - start);
      Batch batch{MatX(obs_dim, b), MatX(act_dim, b), VecX(b), VecX(b), VecX(b)};
      for (int k = 0; k < b; ++k) {
        const int i = order[start + k];
        batch.obs.col(k) = buffer.observations()[i];
        batch.raw.col(k) = buffer.raw_actions()[i];
        batch.old_log_prob[k] = buffer.log_probs()[i];
        batch.advantages[k] = adv.advantages[i];
        batch.returns[k] = adv.returns[i];
      }
      LossGrad lg = ppo_loss(params_, batch, cfg_, true);
      if (!std::isfinite(lg.terms.total) || !lg.grad.allFinite()) {
        params_.set_flat(snapshot);
        buffer.clear();
        throw NumericalError("non-finite PPO loss at epoch " +
                             std::to_string(epoch) + ", minibatch offset " +
                             std::to_string(start));
      }
      const double pre = nn::clip_grad_norm(lg.grad, cfg_.max_grad_norm);
      stats.max_grad_norm_pre = std::max(stats.max_grad_norm_pre, pre);
      stats.max_grad_norm_post = std::max(stats.max_grad_norm_post, lg.grad.norm());
      if (pre > cfg_.max_grad_norm) ++stats.clipped_steps;
      adam_.step(theta, lg.grad);
      params_.set_flat(theta);
      ++stats.optimizer_steps;
      stats.loss.total += lg.terms.total;
      stats.loss.policy += lg.terms.policy;
      stats.loss.value += lg.terms.value;
      stats.loss.entropy += lg.terms.entropy;
      stats.loss.approx_kl += lg.terms.approx_kl;
      stats.loss.clip_fraction += lg.terms.clip_fraction;
    }
  }
  const double inv = 1.0 / stats.optimizer_steps;
  stats.loss.total *= inv;
  stats.loss.policy *= inv;
  stats.loss.value *= inv;
  stats.loss.entropy *= inv;
  stats.loss.approx_kl *= inv;
  stats.loss.clip_fraction *= inv;
  buffer.clear();
  return stats;
}

}  // namespace haps
