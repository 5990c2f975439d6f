#pragma once

#include <cstdint>
#include <vector>

#include "haps/mobility.hpp"
#include "haps/nn/adam.hpp"
#include "haps/nn/mlp.hpp"
#include "haps/types.hpp"

namespace haps {

struct NetConfig {
  int hidden_layers = 3;
  int hidden_width = 128;
  nn::Activation activation = nn::Activation::Tanh;
  double hidden_gain = 1.4142135623730951;  // sqrt(2)
  double policy_output_gain = 0.01;
  double value_output_gain = 1.0;
  double log_std_init = 0.0;  // initial bias of the log-std outputs

  void validate() const;
};

enum class AdvantageMode { Gae, OneStep };
// Entropy in the bonus: of the squashed action distribution, or of the
// pre-squash Gaussian.
enum class EntropyMode { Squashed, Gaussian };

struct PpoConfig {
  double lr = 3e-5;
  double gamma_df = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double entropy_coef = 0.1;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;
  int epochs = 4;
  int minibatch_size = 32;
  int rollout_frames = 128;
  bool normalize_advantages = true;
  AdvantageMode advantage = AdvantageMode::Gae;
  EntropyMode entropy = EntropyMode::Squashed;

  void validate() const;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Per-HAPS (angle, distance) pairs; squashed dims map tanh to
// angle = pi * t and distance = r_max * (t + 1) / 2.
struct ActionSpace {
  int num_haps = 3;
  double r_max = 50.0;

  int size() const { return 2 * num_haps; }
  VecX offset() const;
  VecX scale() const;
};

struct PolicyParams {
  nn::Mlp<double> actor;   // obs -> (means, log-stds)
  nn::Mlp<double> critic;  // obs -> value
  ActionSpace space;

  static PolicyParams make(int obs_dim, const ActionSpace& space,
                           const NetConfig& net, RandomStream& rng);
  int observation_size() const { return actor.input_size(); }
  Eigen::Index num_params() const {
    return actor.num_params() + critic.num_params();
  }
  VecX flat() const;
  void set_flat(const VecX& p);
};

struct PolicyOutput {
  VecX mean;
  VecX log_std;  // clamped to [kLogStdMin, kLogStdMax]
};

PolicyOutput policy_forward(const PolicyParams& params, const VecX& obs);
double value_forward(const PolicyParams& params, const VecX& obs);

struct SampledAction {
  VecX raw;       // pre-squash Gaussian sample
  VecX squashed;  // in the action box
  std::vector<Action> actions;
  double log_prob = 0.0;
};

// Maps a squashed vector to per-HAPS actions; an angle that rounds to +pi is
// wrapped to -pi.
std::vector<Action> to_actions(const VecX& squashed, const ActionSpace& space);

SampledAction sample_action(const PolicyOutput& out, const ActionSpace& space,
                            RandomStream& rng);
// Exploration off: squash(mean).
SampledAction mean_action(const PolicyOutput& out, const ActionSpace& space);

double squashed_entropy(const PolicyOutput& out, const ActionSpace& space);

class RolloutBuffer {
 public:
  explicit RolloutBuffer(int capacity = 128) : capacity_(capacity) {}

  void add(const VecX& obs, const SampledAction& action, double reward,
           double value, bool done);
  void clear();
  bool full() const { return size() >= capacity_; }
  int size() const { return static_cast<int>(rewards_.size()); }
  int capacity() const { return capacity_; }

  const std::vector<VecX>& observations() const { return obs_; }
  const std::vector<VecX>& raw_actions() const { return raw_; }
  const std::vector<VecX>& squashed_actions() const { return squashed_; }
  const std::vector<double>& log_probs() const { return log_probs_; }
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& dones() const { return dones_; }

 private:
  int capacity_;
  std::vector<VecX> obs_, raw_, squashed_;
  std::vector<double> log_probs_, rewards_, values_;
  std::vector<std::uint8_t> dones_;
};

// Column-major minibatch.
struct Batch {
  MatX obs;  // obs_dim x B
  MatX raw;  // action_dim x B
  VecX old_log_prob;
  VecX advantages;
  VecX returns;

  int size() const { return static_cast<int>(obs.cols()); }
};

// Per-sample clipped surrogate min(r A, clip(r, 1-eps, 1+eps) A).
double clipped_surrogate(double ratio, double advantage, double eps);

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;  // mean squashed entropy (bonus, before the coef)
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct LossGrad {
  LossTerms terms;
  VecX grad;  // actor params, then critic params
};

LossGrad ppo_loss(const PolicyParams& params, const Batch& batch,
                  const PpoConfig& cfg, bool with_grad = true);

// Max relative error between analytic and central-difference gradients of
// the total loss.
double grad_check(const PolicyParams& params, const Batch& batch,
                  const PpoConfig& cfg, double step = 1e-5);

struct UpdateStats {
  LossTerms loss;  // averaged over minibatches
  double max_grad_norm_pre = 0.0;
  double max_grad_norm_post = 0.0;
  int optimizer_steps = 0;
  int clipped_steps = 0;
};

class PpoAgent {
 public:
  PpoAgent(int obs_dim, const ActionSpace& space, const NetConfig& net,
           const PpoConfig& cfg, std::uint64_t seed);
  PpoAgent(PolicyParams params, const PpoConfig& cfg, std::uint64_t seed);

  struct Step {
    SampledAction action;
    double value = 0.0;
  };
  Step act(const VecX& obs, bool explore);

  // On-policy update from a full buffer; clears it. Throws NumericalError
  // (with parameters restored) when a loss goes non-finite.
  UpdateStats update(RolloutBuffer& buffer, double bootstrap_value = 0.0);

  const PolicyParams& params() const { return params_; }
  PolicyParams& params() { return params_; }
  const PpoConfig& config() const { return cfg_; }

 private:
  PolicyParams params_;
  PpoConfig cfg_;
  nn::Adam<double> adam_;
  RandomStream action_rng_;
  RandomStream shuffle_rng_;
};

}  // namespace haps
