// Command-line driver: single-run training plus the batch experiment
// protocols, sharing the library's config-file/override plumbing.
//
// Exit codes: 0 success, 2 configuration or input-artifact problem,
// 3 numeric failure during training, 1 anything unexpected.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwrl/config.hpp"
#include "dwrl/demos.hpp"
#include "dwrl/error.hpp"
#include "dwrl/experiment.hpp"
#include "dwrl/trainer.hpp"

namespace {

using dwrl::ExperimentManifest;
using dwrl::Mode;
using dwrl::TrainConfig;

// Options shared by every training-backed subcommand. Precedence: built-in
// defaults, then the config file, then explicit flags, then --set pairs.
struct ConfigFlags {
  std::string config_file;
  std::string env;
  std::string mode;
  std::string weight_form;
  std::string demos;
  std::string iterations;
  std::string seed;
  std::vector<std::string> sets;

  CLI::Option* env_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* form_opt = nullptr;
  CLI::Option* demos_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key=value config file applied first");
    env_opt = cmd->add_option("--env", env, "environment id (gridworld8 | cartpole | pointmass)");
    mode_opt = cmd->add_option("--mode", mode, "training mode (rl | il | lba | lfnd-now | lfnd)");
    form_opt = cmd->add_option("--weight-form", weight_form,
                               "demo weighting (onezero | linear<delta> | log | constant1)");
    demos_opt = cmd->add_option("--demos", demos, "demo file (JSON lines)");
    iters_opt = cmd->add_option("--iterations", iterations, "training iterations");
    seed_opt = cmd->add_option("--seed", seed, "base RNG seed");
    cmd->add_option("--set", sets, "extra key=value overrides, applied last")
        ->take_all();
  }

  TrainConfig build() const {
    TrainConfig cfg;
    if (!config_file.empty()) dwrl::apply_train_config_file(cfg, config_file);
    auto apply_if = [&](CLI::Option* opt, const std::string& key, const std::string& value) {
      if (opt != nullptr && opt->count() > 0) dwrl::apply_train_kv(cfg, key, value);
    };
    apply_if(env_opt, "env", env);
    apply_if(mode_opt, "mode", mode);
    apply_if(form_opt, "weight_form", weight_form);
    apply_if(demos_opt, "demo_path", demos);
    apply_if(iters_opt, "iterations", iterations);
    apply_if(seed_opt, "seed", seed);
    for (const std::string& pair : sets) {
      std::size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        throw dwrl::ConfigError("--set expects key=value, got '" + pair + "'");
      }
      dwrl::apply_train_kv(cfg, pair.substr(0, eq), pair.substr(eq + 1));
    }
    return cfg;
  }
};

// Flags describing an experiment grid on top of the shared config.
struct ManifestFlags {
  ConfigFlags config;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string expert_path, immature_path;
  int demo_count = 10;
  std::vector<std::string> methods;

  void attach(CLI::App* cmd, bool with_checkpoints) {
    config.attach(cmd);
    cmd->add_option("--seeds", seeds, "seeds, one cell set per seed")
        ->required()
        ->delimiter(',');
    cmd->add_option("--out", out_dir, "output directory for runs and figures")->required();
    cmd->add_option("--methods", methods, "methods to run (default: all five)")->delimiter(',');
    if (with_checkpoints) {
      cmd->add_option("--expert", expert_path, "expert checkpoint for demo generation");
      cmd->add_option("--immature", immature_path, "early checkpoint used as the noise source");
      cmd->add_option("--demo-count", demo_count, "trajectories per generated demo set");
    }
  }

  ExperimentManifest build(ExperimentManifest::Kind kind) const {
    ExperimentManifest m;
    m.kind = kind;
    m.base = config.build();
    m.seeds = seeds;
    m.out_dir = out_dir;
    m.demo_path = m.base.demo_path;
    m.expert_path = expert_path;
    m.immature_path = immature_path;
    m.demo_count = demo_count;
    if (!methods.empty()) {
      m.methods.clear();
      for (const std::string& name : methods) m.methods.push_back(dwrl::mode_from_name(name));
    }
    return m;
  }
};

void print_summary(const std::vector<dwrl::MethodSummary>& rows, double expert_mean,
                   bool have_expert) {
  for (const dwrl::MethodSummary& r : rows) {
    std::printf("%-10s mean %9.4f +- %.4f   max %9.4f +- %.4f\n", r.label.c_str(), r.mean_reward,
                r.mean_reward_std, r.max_reward, r.max_reward_std);
  }
  if (have_expert) std::printf("%-10s mean %9.4f (demo trajectories)\n", "expert", expert_mean);
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const dwrl::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const dwrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dwrl::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demonstration-weighted reinforcement learning toolkit"};
  app.require_subcommand(1);

  // --- single training run -------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "run one training configuration");
  ConfigFlags train_flags;
  train_flags.attach(train_cmd);
  std::string train_metrics, train_dump, train_checkpoint, train_resume;
  train_cmd->add_option("--out", train_metrics, "metrics CSV path");
  train_cmd->add_option("--dump-weights", train_dump, "per-iteration weight record CSV");
  train_cmd->add_option("--checkpoint", train_checkpoint, "checkpoint written when done");
  train_cmd->add_option("--resume", train_resume, "checkpoint to resume from");

  // --- expert / demo preparation ------------------------------------------
  auto* expert_cmd = app.add_subcommand("train-expert",
                                        "train an expert, snapshotting an immature policy");
  ConfigFlags expert_flags;
  expert_flags.attach(expert_cmd);
  std::string expert_out;
  double immature_fraction = 0.1;
  expert_cmd->add_option("--out", expert_out, "directory for the checkpoints")->required();
  expert_cmd->add_option("--immature-fraction", immature_fraction,
                         "fraction of iterations before the immature snapshot");

  auto* demos_cmd = app.add_subcommand("gen-demos", "roll expert demos with optional noise");
  std::string gd_expert, gd_immature, gd_env, gd_out;
  int gd_count = 10;
  double gd_ratio = 0.0, gd_gamma = 0.99;
  std::uint64_t gd_seed = 0;
  demos_cmd->add_option("--expert", gd_expert, "expert checkpoint")->required();
  demos_cmd->add_option("--immature", gd_immature, "noise-source checkpoint");
  demos_cmd->add_option("--env", gd_env, "environment id")->required();
  demos_cmd->add_option("--count", gd_count, "trajectories to roll");
  demos_cmd->add_option("--noise-ratio", gd_ratio, "fraction of trajectories to corrupt");
  demos_cmd->add_option("--seed", gd_seed, "RNG seed");
  demos_cmd->add_option("--gamma", gd_gamma, "discount recorded in the demo file");
  demos_cmd->add_option("--out", gd_out, "demo file to write")->required();

  // --- experiment grids ----------------------------------------------------
  auto* compare_cmd = app.add_subcommand("compare", "all methods on one demo set");
  ManifestFlags compare_flags;
  compare_flags.attach(compare_cmd, false);

  auto* sweep_cmd = app.add_subcommand("sweep-noise", "methods across demo noise ratios");
  ManifestFlags sweep_flags;
  sweep_flags.attach(sweep_cmd, true);

  auto* groups_cmd = app.add_subcommand("weight-groups",
                                        "imitation quality by learned-weight decile");
  ManifestFlags groups_flags;
  groups_flags.attach(groups_cmd, false);

  auto* forms_cmd = app.add_subcommand("weight-forms", "compare weighting strategies");
  ManifestFlags forms_flags;
  forms_flags.attach(forms_cmd, false);

  auto* render_cmd = app.add_subcommand("render",
                                        "rebuild figures of a finished experiment from its CSVs");
  ManifestFlags render_flags;
  std::string render_kind;
  render_flags.attach(render_cmd, true);
  render_cmd->add_option("--kind", render_kind, "compare | sweep | weight-groups | weight-forms")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  return run_guarded([&] {
    if (app.got_subcommand(train_cmd)) {
      TrainConfig cfg = train_flags.build();
      cfg.metrics_path = train_metrics;
      cfg.weight_dump_path = train_dump;
      cfg.checkpoint_path = train_checkpoint;
      cfg.resume_path = train_resume;
      dwrl::TrainResult result = dwrl::train(cfg);
      std::printf("iterations=%zu env_steps=%llu final_return=%.6f\n", result.metrics.size(),
                  static_cast<unsigned long long>(result.env_steps),
                  result.metrics.empty() ? 0.0 : result.metrics.back().mean_episode_return);
      return;
    }
    if (app.got_subcommand(expert_cmd)) {
      dwrl::ExpertArtifacts paths =
          dwrl::cmd_train_expert(expert_flags.build(), expert_out, immature_fraction);
      std::printf("expert=%s\nimmature=%s\n", paths.expert_path.c_str(),
                  paths.immature_path.c_str());
      return;
    }
    if (app.got_subcommand(demos_cmd)) {
      dwrl::cmd_gen_demos(gd_expert, gd_immature, gd_env, gd_count, gd_ratio, gd_seed, gd_gamma,
                          gd_out);
      dwrl::DemoStats stats = dwrl::demoset_stats(dwrl::load_demos(gd_out));
      std::printf("wrote %s: %d trajectories, %zu noisy, mean return %.4f\n", gd_out.c_str(),
                  gd_count, stats.noisy_trajectories, stats.mean_return);
      return;
    }
    if (app.got_subcommand(compare_cmd)) {
      dwrl::CompareOutput out =
          dwrl::cmd_compare(compare_flags.build(ExperimentManifest::Kind::kCompare));
      print_summary(out.summary, out.expert_mean, true);
      std::printf("summary=%s\nfigure=%s\n", out.summary_csv.c_str(), out.curves_svg.c_str());
      return;
    }
    if (app.got_subcommand(sweep_cmd)) {
      dwrl::SweepOutput out =
          dwrl::cmd_noise_sweep(sweep_flags.build(ExperimentManifest::Kind::kNoiseSweep));
      std::printf("table=%s\nfigure=%s\n", out.improvement_csv.c_str(), out.bars_svg.c_str());
      return;
    }
    if (app.got_subcommand(groups_cmd)) {
      dwrl::WeightGroupsOutput out =
          dwrl::cmd_weight_groups(groups_flags.build(ExperimentManifest::Kind::kWeightGroups));
      std::printf("table=%s\nfigure=%s\n", out.deciles_csv.c_str(), out.figure_svg.c_str());
      return;
    }
    if (app.got_subcommand(forms_cmd)) {
      dwrl::WeightFormsOutput out =
          dwrl::cmd_weight_forms(forms_flags.build(ExperimentManifest::Kind::kWeightForms));
      print_summary(out.summary, 0.0, false);
      std::printf("summary=%s\nfigure=%s\n", out.summary_csv.c_str(), out.curves_svg.c_str());
      return;
    }
    if (app.got_subcommand(render_cmd)) {
      ExperimentManifest::Kind kind;
      if (render_kind == "compare") {
        kind = ExperimentManifest::Kind::kCompare;
      } else if (render_kind == "sweep") {
        kind = ExperimentManifest::Kind::kNoiseSweep;
      } else if (render_kind == "weight-groups") {
        kind = ExperimentManifest::Kind::kWeightGroups;
      } else if (render_kind == "weight-forms") {
        kind = ExperimentManifest::Kind::kWeightForms;
      } else {
        throw dwrl::ConfigError("unknown render kind '" + render_kind +
                                "' (expected compare | sweep | weight-groups | weight-forms)");
      }
      dwrl::cmd_render(render_flags.build(kind));
      std::printf("re-rendered %s\n", render_flags.out_dir.c_str());
      return;
    }
  });
}
