#pragma once

#include <string>

#include "dwrl/trainer.hpp"

namespace dwrl {

// Apply one "key = value" setting to a training configuration. Every
// TrainConfig field is addressable; unknown keys or unparseable values raise
// ConfigError naming the key. Keys:
//   env, mode, pretrain_iters, weight_form, lambda, gamma, gae_lambda,
//   explorer (ppo|trpo), ppo_epsilon, trpo_beta, standardize_advantages,
//   iterations, steps_per_iteration, seed, demo_path, eval_episodes,
//   hidden (comma-separated sizes), final_layer_scale, policy_lr, value_lr,
//   value_epochs, n_envs, threads, weighted_il, metrics_path,
//   weight_dump_path, checkpoint_path, resume_path
void apply_train_kv(TrainConfig& config, const std::string& key, const std::string& value);

// Flat text file of "key = value" lines; '#' starts a comment, blank lines
// are ignored. Later lines override earlier ones. Errors carry path:line.
void apply_train_config_file(TrainConfig& config, const std::string& path);

}  // namespace dwrl
