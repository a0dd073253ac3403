#pragma once

#include <variant>
#include <vector>

#include "dwrl/demos.hpp"
#include "dwrl/mlp.hpp"
#include "dwrl/policy.hpp"
#include "dwrl/weighting.hpp"

namespace dwrl {

// One environment step as stored in the rollout memory. log_prob and old_dist
// are recorded under the collecting policy at collection time.
struct Transition {
  std::vector<double> state;
  Action action;
  double log_prob = 0.0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  ActionDistribution old_dist;
};

struct RolloutBatch {
  std::vector<Transition> transitions;
  std::vector<double> advantages;
  std::vector<double> value_targets;

  std::size_t size() const { return transitions.size(); }
  bool ready() const {
    return !transitions.empty() && advantages.size() == transitions.size() &&
           value_targets.size() == transitions.size();
  }
};

// Exploration surrogate: clipped-ratio, or ratio with a KL penalty.
struct Ppo {
  double epsilon = 0.2;
};
struct TrpoPenalty {
  double beta = 0.01;
};
using Explorer = std::variant<Ppo, TrpoPenalty>;

struct LossConfig {
  double lambda_tradeoff = 1.0;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  Explorer explorer = Ppo{};
  bool standardize_advantages = true;
};

// Fill batch.advantages and batch.value_targets.
//   delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
//   A_t     = delta_t + gamma * gae_lambda * (1 - done_t) * A_{t+1}
// Value targets are A + V(s) from the unstandardized advantages; advantages
// are then standardized to mean 0 / std 1 unless disabled.
void compute_advantages(RolloutBatch& batch, const MlpParams& value_net, double gamma,
                        double gae_lambda, bool standardize = true, int threads = 0);

struct LossResult {
  double loss = 0.0;
  Gradients grads;
};

// -mean_t min(r_t * A_t, clip(r_t, 1-eps, 1+eps) * A_t), r_t the new/old
// likelihood ratio of the taken action.
LossResult ppo_loss(const RolloutBatch& batch, const MlpParams& policy, double epsilon,
                    int threads = 0);

// -mean_t (r_t * A_t) + beta * mean_t KL(old_t || new_t), closed-form KL.
LossResult trpo_penalty_loss(const RolloutBatch& batch, const MlpParams& policy, double beta,
                             int threads = 0);

LossResult explore_loss(const RolloutBatch& batch, const MlpParams& policy,
                        const Explorer& explorer, int threads = 0);

// Weighted imitation loss over every instance, normalized by instance count.
// Discrete: cross-entropy against the recorded expert distribution.
// Continuous: negative log-likelihood of the recorded expert action.
LossResult demo_loss(const DemoSet& demos, const std::vector<WeightRecord>& weights,
                     const MlpParams& policy, int threads = 0);

// l = l_demo + lambda * l_explore with merged gradients.
LossResult joint_loss(const LossResult& demo, const LossResult& explore, double lambda_tradeoff);

// Full-batch MSE of V(s) against batch.value_targets, with gradients.
LossResult value_loss(const RolloutBatch& batch, const MlpParams& value_net, int threads = 0);

// Full-batch MSE regression of V(s) onto value_targets, `epochs` optimizer
// steps. Returns the loss measured before the first step.
double update_value_net(MlpParams& value_net, AdamState& opt, const RolloutBatch& batch,
                        double learning_rate, int epochs, int threads = 0);

}  // namespace dwrl
