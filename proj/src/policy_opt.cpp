#include "dwrl/policy_opt.hpp"

#include <algorithm>
#include <cmath>

#include "dwrl/error.hpp"
#include "dwrl/kernels.hpp"

namespace dwrl {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)

Tensor stack_states(const std::vector<Transition>& transitions, bool next) {
  const auto obs_dim = static_cast<std::int64_t>(
      (next ? transitions.front().next_state : transitions.front().state).size());
  Tensor out({static_cast<std::int64_t>(transitions.size()), obs_dim});
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    const auto& s = next ? transitions[t].next_state : transitions[t].state;
    if (static_cast<std::int64_t>(s.size()) != obs_dim) {
      throw DimensionError("rollout batch has inconsistent state widths");
    }
    std::copy(s.begin(), s.end(),
              out.data.begin() + static_cast<std::ptrdiff_t>(t * static_cast<std::size_t>(obs_dim)));
  }
  return out;
}

void require_ready(const RolloutBatch& batch, const char* who) {
  if (batch.transitions.empty()) throw DomainError(std::string(who) + ": empty rollout batch");
  if (!batch.ready()) {
    throw StateError(std::string(who) + ": advantages/value targets not computed");
  }
}

// Whether the raw log-std entry moves the clamped value (saturated entries
// get zero gradient).
bool log_std_active(double raw) { return raw > kLogStdMin && raw < kLogStdMax; }

// Shared surrogate machinery: given per-sample d(loss)/d(log pi_new(a_t)),
// push gradients into dz (softmax logits or gaussian mean) and log_std.
struct PolicyEval {
  ForwardTrace trace;
  std::int64_t batch = 0, act_dim = 0;
  // Discrete:
  std::vector<double> log_probs_rows;  // log softmax of output, row-major
  std::vector<double> probs_rows;      // softmax of output, row-major
  // Gaussian:
  std::vector<double> log_std, inv_var;  // per action dim, clamped
};

PolicyEval eval_policy(const MlpParams& policy, const Tensor& states, int threads) {
  PolicyEval ev;
  ev.trace = mlp_forward_trace(policy, states, threads);
  ev.batch = ev.trace.output.shape[0];
  ev.act_dim = ev.trace.output.shape[1];
  if (policy.head == Head::kSoftmax) {
    ev.log_probs_rows.resize(ev.trace.output.size());
    ev.probs_rows.resize(ev.trace.output.size());
    kernels::log_softmax_rows(ev.trace.output.data.data(), ev.batch, ev.act_dim,
                              ev.log_probs_rows.data(), threads);
    kernels::softmax_rows(ev.trace.output.data.data(), ev.batch, ev.act_dim,
                          ev.probs_rows.data(), threads);
  } else if (policy.head == Head::kGaussian) {
    ev.log_std.resize(static_cast<std::size_t>(ev.act_dim));
    ev.inv_var.resize(static_cast<std::size_t>(ev.act_dim));
    for (std::int64_t i = 0; i < ev.act_dim; ++i) {
      const double ls = clamped_log_std(policy.log_std[static_cast<std::size_t>(i)]);
      ev.log_std[static_cast<std::size_t>(i)] = ls;
      ev.inv_var[static_cast<std::size_t>(i)] = std::exp(-2.0 * ls);
    }
  } else {
    throw DomainError("exploration loss needs a softmax or gaussian policy head");
  }
  return ev;
}

double new_log_prob(const PolicyEval& ev, const MlpParams& policy, const Transition& tr,
                    std::int64_t t) {
  if (policy.head == Head::kSoftmax) {
    const int a = tr.action.index();
    if (a < 0 || a >= static_cast<int>(ev.act_dim)) {
      throw DomainError("rollout action index " + std::to_string(a) + " out of range");
    }
    return ev.log_probs_rows[static_cast<std::size_t>(t * ev.act_dim + a)];
  }
  const auto& a = tr.action.vec();
  if (static_cast<std::int64_t>(a.size()) != ev.act_dim) {
    throw DimensionError("rollout action dimension mismatch");
  }
  double lp = 0.0;
  for (std::int64_t i = 0; i < ev.act_dim; ++i) {
    const double mu = ev.trace.output.at(t, i);
    const double diff = a[static_cast<std::size_t>(i)] - mu;
    lp += -0.5 * diff * diff * ev.inv_var[static_cast<std::size_t>(i)] -
          ev.log_std[static_cast<std::size_t>(i)] - kHalfLog2Pi;
  }
  return lp;
}

// d(log pi(a_t)) / d(raw output row t) into dz, and d/d(log_std) into g_ls,
// both scaled by `coeff`.
void add_log_prob_grad(const PolicyEval& ev, const MlpParams& policy, const Transition& tr,
                       std::int64_t t, double coeff, Tensor& dz, Tensor& g_ls) {
  if (policy.head == Head::kSoftmax) {
    const int a = tr.action.index();
    for (std::int64_t j = 0; j < ev.act_dim; ++j) {
      const double onehot = (j == a) ? 1.0 : 0.0;
      dz.at(t, j) += coeff * (onehot - ev.probs_rows[static_cast<std::size_t>(t * ev.act_dim + j)]);
    }
    return;
  }
  const auto& a = tr.action.vec();
  for (std::int64_t i = 0; i < ev.act_dim; ++i) {
    const double mu = ev.trace.output.at(t, i);
    const double diff = a[static_cast<std::size_t>(i)] - mu;
    const double iv = ev.inv_var[static_cast<std::size_t>(i)];
    dz.at(t, i) += coeff * diff * iv;
    if (log_std_active(policy.log_std[static_cast<std::size_t>(i)])) {
      g_ls[static_cast<std::size_t>(i)] += coeff * (diff * diff * iv - 1.0);
    }
  }
}

LossResult finish(const MlpParams& policy, const PolicyEval& ev, const Tensor& dz,
                  const Tensor& g_ls, double loss, int threads) {
  LossResult out;
  out.loss = loss;
  out.grads = mlp_backward(policy, ev.trace, dz, threads);
  if (policy.head == Head::kGaussian) out.grads.log_std = g_ls;
  if (!std::isfinite(loss)) throw NumericError("exploration loss is non-finite");
  return out;
}

}  // namespace

void compute_advantages(RolloutBatch& batch, const MlpParams& value_net, double gamma,
                        double gae_lambda, bool standardize, int threads) {
  if (batch.transitions.empty()) throw DomainError("compute_advantages: empty rollout batch");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("compute_advantages: gamma outside [0,1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw DomainError("compute_advantages: gae_lambda outside [0,1]");
  }
  const auto T = batch.transitions.size();
  const auto values = value_forward(value_net, stack_states(batch.transitions, false), threads);
  const auto next_values = value_forward(value_net, stack_states(batch.transitions, true), threads);

  batch.advantages.assign(T, 0.0);
  batch.value_targets.assign(T, 0.0);
  double carry = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    const auto& tr = batch.transitions[t];
    const double not_done = tr.done ? 0.0 : 1.0;
    const double delta = tr.reward + gamma * next_values[t] * not_done - values[t];
    carry = delta + gamma * gae_lambda * not_done * carry;
    batch.advantages[t] = carry;
    batch.value_targets[t] = carry + values[t];
  }

  if (standardize) {
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= static_cast<double>(T);
    double var = 0.0;
    for (double a : batch.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(T);
    const double denom = std::sqrt(var) + 1e-8;
    for (double& a : batch.advantages) a = (a - mean) / denom;
  }
}

LossResult ppo_loss(const RolloutBatch& batch, const MlpParams& policy, double epsilon,
                    int threads) {
  require_ready(batch, "ppo_loss");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("ppo_loss: epsilon outside (0,1)");
  auto ev = eval_policy(policy, stack_states(batch.transitions, false), threads);
  const auto T = static_cast<double>(batch.size());
  Tensor dz({ev.batch, ev.act_dim});
  Tensor g_ls = Tensor(policy.log_std.shape);

  double loss = 0.0;
  for (std::int64_t t = 0; t < ev.batch; ++t) {
    const auto& tr = batch.transitions[static_cast<std::size_t>(t)];
    const double adv = batch.advantages[static_cast<std::size_t>(t)];
    const double lp_new = new_log_prob(ev, policy, tr, t);
    const double ratio = std::exp(lp_new - tr.log_prob);
    if (!std::isfinite(ratio)) throw NumericError("ppo_loss: non-finite probability ratio");
    const double clipped_ratio = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    const double unclipped = ratio * adv;
    const double clipped = clipped_ratio * adv;
    loss -= std::min(unclipped, clipped) / T;

    // When the clipped branch wins the min, the clip is necessarily
    // saturated, so the objective is locally flat in the parameters.
    if (unclipped <= clipped) {
      add_log_prob_grad(ev, policy, tr, t, -ratio * adv / T, dz, g_ls);
    }
  }
  return finish(policy, ev, dz, g_ls, loss, threads);
}

LossResult trpo_penalty_loss(const RolloutBatch& batch, const MlpParams& policy, double beta,
                             int threads) {
  require_ready(batch, "trpo_penalty_loss");
  if (!(beta > 0.0)) throw DomainError("trpo_penalty_loss: beta must be > 0");
  auto ev = eval_policy(policy, stack_states(batch.transitions, false), threads);
  const auto T = static_cast<double>(batch.size());
  Tensor dz({ev.batch, ev.act_dim});
  Tensor g_ls = Tensor(policy.log_std.shape);

  double loss = 0.0;
  for (std::int64_t t = 0; t < ev.batch; ++t) {
    const auto& tr = batch.transitions[static_cast<std::size_t>(t)];
    const auto& old = tr.old_dist;
    if (old.head != policy.head || static_cast<std::int64_t>(old.dim()) != ev.act_dim) {
      throw DomainError("trpo_penalty_loss: recorded distribution does not match the policy head");
    }
    const double adv = batch.advantages[static_cast<std::size_t>(t)];
    const double lp_new = new_log_prob(ev, policy, tr, t);
    const double ratio = std::exp(lp_new - tr.log_prob);
    if (!std::isfinite(ratio)) throw NumericError("trpo_penalty_loss: non-finite ratio");
    loss -= ratio * adv / T;
    add_log_prob_grad(ev, policy, tr, t, -ratio * adv / T, dz, g_ls);

    // beta * KL(old || new) and its gradient in the new parameters.
    if (policy.head == Head::kSoftmax) {
      if (old.probs[static_cast<std::size_t>(tr.action.index())] <= 0.0) {
        throw NumericError("trpo_penalty_loss: old distribution has no mass on the taken action");
      }
      double kl = 0.0;
      for (std::int64_t j = 0; j < ev.act_dim; ++j) {
        const double po = old.probs[static_cast<std::size_t>(j)];
        const double lpn = ev.log_probs_rows[static_cast<std::size_t>(t * ev.act_dim + j)];
        if (po > 0.0) kl += po * (std::log(po) - lpn);
        const double pn = ev.probs_rows[static_cast<std::size_t>(t * ev.act_dim + j)];
        dz.at(t, j) += beta / T * (pn - po);
      }
      loss += beta * kl / T;
    } else {
      for (std::int64_t i = 0; i < ev.act_dim; ++i) {
        const double mu_n = ev.trace.output.at(t, i);
        const double mu_o = old.mean[static_cast<std::size_t>(i)];
        const double ls_n = ev.log_std[static_cast<std::size_t>(i)];
        const double ls_o = old.log_std[static_cast<std::size_t>(i)];
        const double var_n = std::exp(2.0 * ls_n);
        const double var_o = std::exp(2.0 * ls_o);
        const double dm = mu_o - mu_n;
        loss += beta / T * (ls_n - ls_o + (var_o + dm * dm) / (2.0 * var_n) - 0.5);
        dz.at(t, i) += beta / T * (mu_n - mu_o) / var_n;
        if (log_std_active(policy.log_std[static_cast<std::size_t>(i)])) {
          g_ls[static_cast<std::size_t>(i)] += beta / T * (1.0 - (var_o + dm * dm) / var_n);
        }
      }
    }
  }
  return finish(policy, ev, dz, g_ls, loss, threads);
}

LossResult explore_loss(const RolloutBatch& batch, const MlpParams& policy,
                        const Explorer& explorer, int threads) {
  if (const auto* ppo = std::get_if<Ppo>(&explorer)) {
    return ppo_loss(batch, policy, ppo->epsilon, threads);
  }
  return trpo_penalty_loss(batch, policy, std::get<TrpoPenalty>(explorer).beta, threads);
}

LossResult demo_loss(const DemoSet& demos, const std::vector<WeightRecord>& weights,
                     const MlpParams& policy, int threads) {
  const auto N = demos.instance_count();
  if (N == 0) throw DomainError("demo_loss: empty demonstration set");
  if (weights.size() != N) {
    throw DomainError("demo_loss: " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(N) + " instances");
  }

  Tensor states({static_cast<std::int64_t>(N),
                 static_cast<std::int64_t>(demos.trajectories.front().instances.front().state.size())});
  std::size_t row = 0;
  for (const auto& traj : demos.trajectories) {
    for (const auto& inst : traj.instances) {
      if (static_cast<std::int64_t>(inst.state.size()) != states.shape[1]) {
        throw DimensionError("demo_loss: inconsistent state widths in demo set");
      }
      std::copy(inst.state.begin(), inst.state.end(),
                states.data.begin() +
                    static_cast<std::ptrdiff_t>(row * static_cast<std::size_t>(states.shape[1])));
      ++row;
    }
  }
  auto ev = eval_policy(policy, states, threads);
  Tensor dz({ev.batch, ev.act_dim});
  Tensor g_ls = Tensor(policy.log_std.shape);
  const double scale = 1.0 / static_cast<double>(N);

  double loss = 0.0;
  std::size_t idx = 0;
  for (const auto& traj : demos.trajectories) {
    for (std::size_t j = 0; j < traj.length(); ++j, ++idx) {
      const auto& inst = traj.instances[j];
      const auto& rec = weights[idx];
      if (rec.trajectory_id != traj.id || rec.step_index != static_cast<int>(j)) {
        throw DomainError("demo_loss: weight records out of order at instance " +
                          std::to_string(idx));
      }
      const double w = rec.weight;
      const auto t64 = static_cast<std::int64_t>(idx);
      if (policy.head == Head::kSoftmax) {
        if (static_cast<std::int64_t>(inst.action_probs.size()) != ev.act_dim) {
          throw DomainError("demo_loss: instance " + std::to_string(idx) +
                            " lacks a full expert action distribution");
        }
        double target_sum = 0.0;
        for (double p : inst.action_probs) target_sum += p;
        for (std::int64_t k = 0; k < ev.act_dim; ++k) {
          const double target = inst.action_probs[static_cast<std::size_t>(k)];
          const double lp = ev.log_probs_rows[static_cast<std::size_t>(t64 * ev.act_dim + k)];
          loss -= w * scale * target * lp;
          const double p = ev.probs_rows[static_cast<std::size_t>(t64 * ev.act_dim + k)];
          dz.at(t64, k) += w * scale * (p * target_sum - target);
        }
      } else {
        const auto& target = inst.expert_action.vec();
        if (static_cast<std::int64_t>(target.size()) != ev.act_dim) {
          throw DimensionError("demo_loss: expert action dimension mismatch");
        }
        for (std::int64_t i = 0; i < ev.act_dim; ++i) {
          const double mu = ev.trace.output.at(t64, i);
          const double diff = target[static_cast<std::size_t>(i)] - mu;
          const double iv = ev.inv_var[static_cast<std::size_t>(i)];
          const double ls = ev.log_std[static_cast<std::size_t>(i)];
          loss += w * scale * (0.5 * diff * diff * iv + ls + kHalfLog2Pi);
          dz.at(t64, i) += w * scale * (mu - target[static_cast<std::size_t>(i)]) * iv;
          if (log_std_active(policy.log_std[static_cast<std::size_t>(i)])) {
            g_ls[static_cast<std::size_t>(i)] += w * scale * (1.0 - diff * diff * iv);
          }
        }
      }
    }
  }
  return finish(policy, ev, dz, g_ls, loss, threads);
}

LossResult joint_loss(const LossResult& demo, const LossResult& explore, double lambda_tradeoff) {
  if (!(lambda_tradeoff >= 0.0)) throw DomainError("joint_loss: lambda must be >= 0");
  LossResult out;
  out.grads = demo.grads;
  if (lambda_tradeoff == 0.0) {
    out.loss = demo.loss;
    return out;
  }
  out.loss = demo.loss + lambda_tradeoff * explore.loss;
  out.grads.add_scaled(explore.grads, lambda_tradeoff);
  return out;
}

LossResult value_loss(const RolloutBatch& batch, const MlpParams& value_net, int threads) {
  require_ready(batch, "value_loss");
  const auto states = stack_states(batch.transitions, false);
  const auto T = static_cast<double>(batch.size());
  auto trace = mlp_forward_trace(value_net, states, threads);
  double mse = 0.0;
  Tensor dout({trace.output.shape[0], 1});
  for (std::int64_t t = 0; t < trace.output.shape[0]; ++t) {
    const double diff = trace.output.at(t, 0) - batch.value_targets[static_cast<std::size_t>(t)];
    mse += diff * diff / T;
    dout.at(t, 0) = 2.0 * diff / T;
  }
  LossResult out;
  out.loss = mse;
  out.grads = mlp_backward(value_net, trace, dout, threads);
  return out;
}

double update_value_net(MlpParams& value_net, AdamState& opt, const RolloutBatch& batch,
                        double learning_rate, int epochs, int threads) {
  require_ready(batch, "update_value_net");
  if (epochs < 0) throw DomainError("update_value_net: negative epoch count");
  double first_loss = 0.0;
  for (int epoch = 0; epoch < std::max(epochs, 1); ++epoch) {
    LossResult r = value_loss(batch, value_net, threads);
    if (epoch == 0) first_loss = r.loss;
    if (epochs == 0) break;
    adam_step(value_net, r.grads, opt, learning_rate);
  }
  return first_loss;
}

}  // namespace dwrl
