#pragma once

#include <vector>

#include "dwrl/env.hpp"
#include "dwrl/mlp.hpp"
#include "dwrl/rng.hpp"

namespace dwrl {

// Action distribution at a single state: probabilities for softmax heads,
// mean and clamped log-std for gaussian heads.
struct ActionDistribution {
  Head head = Head::kSoftmax;
  std::vector<double> probs;
  std::vector<double> mean;
  std::vector<double> log_std;

  std::size_t dim() const { return head == Head::kSoftmax ? probs.size() : mean.size(); }
};

ActionDistribution policy_distribution(const MlpParams& policy, const std::vector<double>& obs);

// Stochastic draw: inverse-CDF for discrete, mean + std * normal per dim for
// gaussian. Consumes rng deterministically.
Action sample_action(const ActionDistribution& dist, RngStream& rng);

// Deterministic draw: argmax probability (lowest index wins ties) or the mean.
Action greedy_action(const ActionDistribution& dist);

double action_log_prob(const ActionDistribution& dist, const Action& action);

// KL(p || q) in closed form; distributions must share head and dimension.
double kl_divergence(const ActionDistribution& p, const ActionDistribution& q);

}  // namespace dwrl
