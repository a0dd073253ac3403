#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dwrl/demos.hpp"
#include "dwrl/env.hpp"
#include "dwrl/mlp.hpp"
#include "dwrl/policy_opt.hpp"
#include "dwrl/weighting.hpp"

namespace dwrl {

// Training modes:
//   kRlOnly  — exploration surrogate only, no demonstrations.
//   kIlOnly  — imitation only, zero training-time environment interaction.
//   kLba     — imitation pretraining for pretrain_iters, then pure exploration.
//   kLfndNoW — joint loss with every demonstration weight fixed to 1.
//   kLfnd    — joint loss with adaptive per-instance weights.
enum class Mode { kRlOnly, kIlOnly, kLba, kLfndNoW, kLfnd };

std::string mode_name(Mode m);
// "rl" | "il" | "lba" | "lfnd-now" | "lfnd"
Mode mode_from_name(const std::string& name);

struct TrainConfig {
  std::string env_id;
  Mode mode = Mode::kLfnd;
  int pretrain_iters = 50;  // kLba: imitation iterations before switching to exploration
  WeightForm weight_form = WeightForm::one_zero();
  LossConfig loss;
  int iterations = 500;
  int steps_per_iteration = 0;  // 0 = per-environment default
  std::uint64_t seed = 0;
  std::string demo_path;  // required for every mode except kRlOnly
  int eval_episodes = 10;

  // Networks and optimizers.
  std::vector<int> hidden = {64, 64};
  double final_layer_scale = 0.01;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;
  int value_epochs = 10;

  // Plumbing.
  int n_envs = 1;    // rollout instances; steps_per_iteration must divide evenly
  int threads = 1;   // kernel threads for batched linear algebra
  bool weighted_il = false;       // kIlOnly: recompute instance weights each iteration
  std::string metrics_path;       // per-iteration CSV, empty = skip
  std::string weight_dump_path;   // per-iteration weight-record CSV, empty = skip
  std::string checkpoint_path;    // final checkpoint, empty = skip
  std::string resume_path;        // resume training from this checkpoint, empty = fresh
};

int default_steps_per_iteration(const std::string& env_id);

struct IterationMetrics {
  int iteration = 0;  // 1-based
  double mean_episode_return = 0.0;
  double loss_demo = 0.0;
  double loss_explore = 0.0;
  double mean_weight = 0.0;
  double fraction_zero_weight = 0.0;
  std::int64_t wall_ms = 0;
};

// Equality of everything except the timing column.
bool same_numbers(const IterationMetrics& a, const IterationMetrics& b);
bool same_numbers(const std::vector<IterationMetrics>& a, const std::vector<IterationMetrics>& b);

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;
};

// Deterministic-action evaluation (argmax / mean) over `episodes` freshly
// seeded episodes; per-episode seeds are derived from `seed`.
EvalResult evaluate(const MlpParams& policy, Environment& env, int episodes, std::uint64_t seed);

struct TrainResult {
  MlpParams policy;
  MlpParams value_net;
  std::vector<IterationMetrics> metrics;  // iterations run by this invocation
  std::int64_t env_steps = 0;  // training interaction steps (evaluation excluded)
};

// Outer training loop. Per iteration: collect rollouts (modes that explore),
// compute advantages, recompute demonstration weights, take one joint
// optimizer step on the policy, regress the value net, evaluate, append
// metrics. Aborts with a diagnostic checkpoint on a non-finite loss.
TrainResult train(const TrainConfig& config);

// CSV column order: iteration,mean_episode_return,loss_demo,loss_explore,
// mean_weight,fraction_zero_weight,wall_ms. Doubles round-trip bit-exactly.
// The append variant creates the file (with header) when absent.
void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& metrics);
void append_metrics_csv(const std::string& path, const IterationMetrics& m);
std::vector<IterationMetrics> read_metrics_csv(const std::string& path);

// CSV column order: iteration,trajectory_id,step_index,q_sigma,v_estimate,weight.
void append_weight_records_csv(const std::string& path, const std::vector<WeightRecord>& records);
std::vector<WeightRecord> read_weight_records_csv(const std::string& path);

}  // namespace dwrl
