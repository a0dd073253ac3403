#include "dwrl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "dwrl/error.hpp"

namespace dwrl {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)

}  // namespace

ActionDistribution policy_distribution(const MlpParams& policy, const std::vector<double>& obs) {
  Tensor input = Tensor::row(obs);
  ActionDistribution dist;
  dist.head = policy.head;
  if (policy.head == Head::kSoftmax) {
    auto out = mlp_forward(policy, input, 1);
    dist.probs = out.data;
  } else if (policy.head == Head::kGaussian) {
    auto out = mlp_forward_raw(policy, input, 1);
    dist.mean = out.data;
    dist.log_std.resize(policy.log_std.size());
    for (std::size_t i = 0; i < dist.log_std.size(); ++i) {
      dist.log_std[i] = clamped_log_std(policy.log_std[i]);
    }
  } else {
    throw DomainError("policy_distribution: linear head has no action distribution");
  }
  return dist;
}

Action sample_action(const ActionDistribution& dist, RngStream& rng) {
  if (dist.head == Head::kSoftmax) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      acc += dist.probs[i];
      if (u < acc) return Action::discrete(static_cast<int>(i));
    }
    return Action::discrete(static_cast<int>(dist.probs.size()) - 1);
  }
  std::vector<double> a(dist.mean.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = dist.mean[i] + std::exp(dist.log_std[i]) * rng.normal();
  }
  return Action::continuous(std::move(a));
}

Action greedy_action(const ActionDistribution& dist) {
  if (dist.head == Head::kSoftmax) {
    auto it = std::max_element(dist.probs.begin(), dist.probs.end());
    return Action::discrete(static_cast<int>(it - dist.probs.begin()));
  }
  return Action::continuous(dist.mean);
}

double action_log_prob(const ActionDistribution& dist, const Action& action) {
  if (dist.head == Head::kSoftmax) {
    const int a = action.index();
    if (a < 0 || a >= static_cast<int>(dist.probs.size())) {
      throw DomainError("action_log_prob: index " + std::to_string(a) + " out of range");
    }
    const double p = dist.probs[static_cast<std::size_t>(a)];
    if (p <= 0.0) throw NumericError("action_log_prob: zero probability on taken action");
    return std::log(p);
  }
  const auto& a = action.vec();
  if (a.size() != dist.mean.size()) {
    throw DomainError("action_log_prob: action dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ls = dist.log_std[i];
    const double z = (a[i] - dist.mean[i]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - kHalfLog2Pi;
  }
  return lp;
}

double kl_divergence(const ActionDistribution& p, const ActionDistribution& q) {
  if (p.head != q.head || p.dim() != q.dim()) {
    throw DomainError("kl_divergence: mismatched distributions");
  }
  if (p.head == Head::kSoftmax) {
    double kl = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
      if (p.probs[i] <= 0.0) continue;
      if (q.probs[i] <= 0.0) throw NumericError("kl_divergence: zero mass in q where p > 0");
      kl += p.probs[i] * (std::log(p.probs[i]) - std::log(q.probs[i]));
    }
    return kl;
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.mean.size(); ++i) {
    const double lsp = p.log_std[i], lsq = q.log_std[i];
    const double vp = std::exp(2.0 * lsp), vq = std::exp(2.0 * lsq);
    const double dm = p.mean[i] - q.mean[i];
    kl += lsq - lsp + (vp + dm * dm) / (2.0 * vq) - 0.5;
  }
  return kl;
}

}  // namespace dwrl
