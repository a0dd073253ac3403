#include <fstream>

#include "doctest.h"
#include "dwrl/config.hpp"
#include "dwrl/error.hpp"
#include "support/tmpdir.hpp"

using namespace dwrl;
using dwrl::testing::TempDir;

TEST_CASE("every configuration key is addressable by name") {
  TrainConfig c;
  apply_train_kv(c, "env", "cartpole");
  CHECK(c.env_id == "cartpole");
  apply_train_kv(c, "mode", "lba");
  CHECK(c.mode == Mode::kLba);
  apply_train_kv(c, "pretrain_iters", "25");
  CHECK(c.pretrain_iters == 25);
  apply_train_kv(c, "weight_form", "linear12.5");
  CHECK(c.weight_form == WeightForm::linear(12.5));
  apply_train_kv(c, "lambda", "0.75");
  CHECK(c.loss.lambda_tradeoff == 0.75);
  apply_train_kv(c, "gamma", "0.9");
  CHECK(c.loss.gamma == 0.9);
  apply_train_kv(c, "gae_lambda", "0.8");
  CHECK(c.loss.gae_lambda == 0.8);
  apply_train_kv(c, "ppo_epsilon", "0.3");
  CHECK(std::get<Ppo>(c.loss.explorer).epsilon == 0.3);
  apply_train_kv(c, "explorer", "trpo");
  apply_train_kv(c, "trpo_beta", "0.05");
  CHECK(std::get<TrpoPenalty>(c.loss.explorer).beta == 0.05);
  apply_train_kv(c, "explorer", "ppo");
  CHECK(std::get<Ppo>(c.loss.explorer).epsilon == 0.2);  // fresh default
  apply_train_kv(c, "standardize_advantages", "false");
  CHECK_FALSE(c.loss.standardize_advantages);
  apply_train_kv(c, "iterations", "123");
  CHECK(c.iterations == 123);
  apply_train_kv(c, "steps_per_iteration", "256");
  CHECK(c.steps_per_iteration == 256);
  apply_train_kv(c, "seed", "18446744073709551615");
  CHECK(c.seed == 18446744073709551615ULL);
  apply_train_kv(c, "demo_path", "/tmp/d.jsonl");
  CHECK(c.demo_path == "/tmp/d.jsonl");
  apply_train_kv(c, "eval_episodes", "4");
  CHECK(c.eval_episodes == 4);
  apply_train_kv(c, "hidden", "32, 16,8");
  CHECK(c.hidden == std::vector<int>{32, 16, 8});
  apply_train_kv(c, "final_layer_scale", "0.5");
  CHECK(c.final_layer_scale == 0.5);
  apply_train_kv(c, "policy_lr", "1e-3");
  CHECK(c.policy_lr == 1e-3);
  apply_train_kv(c, "value_lr", "2e-3");
  CHECK(c.value_lr == 2e-3);
  apply_train_kv(c, "value_epochs", "7");
  CHECK(c.value_epochs == 7);
  apply_train_kv(c, "n_envs", "2");
  CHECK(c.n_envs == 2);
  apply_train_kv(c, "threads", "3");
  CHECK(c.threads == 3);
  apply_train_kv(c, "weighted_il", "true");
  CHECK(c.weighted_il);
  apply_train_kv(c, "metrics_path", "m.csv");
  apply_train_kv(c, "weight_dump_path", "w.csv");
  apply_train_kv(c, "checkpoint_path", "c.dwrl");
  apply_train_kv(c, "resume_path", "r.dwrl");
  CHECK(c.metrics_path == "m.csv");
  CHECK(c.weight_dump_path == "w.csv");
  CHECK(c.checkpoint_path == "c.dwrl");
  CHECK(c.resume_path == "r.dwrl");
}

TEST_CASE("bad keys and bad values name the offender") {
  TrainConfig c;
  CHECK_THROWS_WITH_AS(apply_train_kv(c, "learning_rate", "0.1"),
                       doctest::Contains("learning_rate"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_train_kv(c, "iterations", "many"), doctest::Contains("iterations"),
                       ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "mode", "dagger"), ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "weight_form", "cubic"), ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "explorer", "sac"), ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "weighted_il", "maybe"), ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "hidden", ""), ConfigError);
  CHECK_THROWS_AS(apply_train_kv(c, "gamma", "0.9x"), ConfigError);
}

TEST_CASE("config files: comments, blanks, spacing, later-wins ordering") {
  TempDir dir;
  {
    std::ofstream out(dir.file("run.cfg"));
    out << "# experiment settings\n";
    out << "\n";
    out << "env = gridworld8\n";
    out << "mode=lfnd   # joint training\n";
    out << "iterations = 10\n";
    out << "iterations = 20\n";
    out << "  lambda =  0.5  \n";
  }
  TrainConfig c;
  apply_train_config_file(c, dir.file("run.cfg"));
  CHECK(c.env_id == "gridworld8");
  CHECK(c.mode == Mode::kLfnd);
  CHECK(c.iterations == 20);
  CHECK(c.loss.lambda_tradeoff == 0.5);
}

TEST_CASE("config files: located errors") {
  TempDir dir;
  TrainConfig missing;
  CHECK_THROWS_AS(apply_train_config_file(missing, dir.file("none.cfg")), ConfigError);
  {
    std::ofstream out(dir.file("bad1.cfg"));
    out << "env = gridworld8\n";
    out << "just words\n";
  }
  TrainConfig c;
  CHECK_THROWS_WITH_AS(apply_train_config_file(c, dir.file("bad1.cfg")), doctest::Contains(":2:"),
                       ConfigError);
  {
    std::ofstream out(dir.file("bad2.cfg"));
    out << "= value\n";
  }
  CHECK_THROWS_WITH_AS(apply_train_config_file(c, dir.file("bad2.cfg")), doctest::Contains(":1:"),
                       ConfigError);
  {
    std::ofstream out(dir.file("bad3.cfg"));
    out << "env = gridworld8\n";
    out << "mystery = 4\n";
  }
  CHECK_THROWS_WITH_AS(apply_train_config_file(c, dir.file("bad3.cfg")),
                       doctest::Contains("mystery"), ConfigError);
}
