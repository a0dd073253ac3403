#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dwrl/trainer.hpp"

namespace dwrl {

// A batch experiment: one protocol applied to a grid of (method, seed[, noise
// ratio]) training cells sharing a base configuration. Cells run in parallel
// (capped by the DWRL_THREADS environment variable), write only their own
// artifacts, and are skipped on re-invocation when their output CSV already
// exists with a matching content checksum.
struct ExperimentManifest {
  enum class Kind { kCompare, kNoiseSweep, kWeightGroups, kWeightForms };

  Kind kind = Kind::kCompare;
  std::vector<std::uint64_t> seeds;
  TrainConfig base;  // env_id, iterations, losses, networks — shared by all cells
  std::string out_dir;

  std::string demo_path;  // compare / weight-groups / weight-forms
  std::string expert_path, immature_path;  // noise-sweep demo regeneration
  int demo_count = 10;
  // compare & noise-sweep method set; noise-sweep requires kLfnd present.
  std::vector<Mode> methods = {Mode::kRlOnly, Mode::kIlOnly, Mode::kLba, Mode::kLfndNoW,
                               Mode::kLfnd};
};

struct ExpertArtifacts {
  std::string expert_path;
  std::string immature_path;
};

// Train an exploration-only agent on base.env_id, checkpointing an early
// "immature" snapshot at round(immature_fraction * iterations) iterations and
// the final expert at the end.
ExpertArtifacts cmd_train_expert(const TrainConfig& base, const std::string& out_dir,
                                 double immature_fraction = 0.1);

// Policy network stored in a trainer checkpoint.
MlpParams load_policy_checkpoint(const std::string& path);

// Roll `count` expert episodes, then corrupt round(count * noise_ratio) of
// them with episodes from the immature agent. immature_path may be empty only
// when noise_ratio is 0.
void cmd_gen_demos(const std::string& expert_path, const std::string& immature_path,
                   const std::string& env_id, int count, double noise_ratio, std::uint64_t seed,
                   double gamma, const std::string& out_path);

struct MethodSummary {
  std::string label;
  double mean_reward = 0.0;      // per-seed mean over iterations, averaged across seeds
  double mean_reward_std = 0.0;  // std across seeds
  double max_reward = 0.0;       // per-seed max over iterations, averaged across seeds
  double max_reward_std = 0.0;
};

struct CompareOutput {
  std::vector<MethodSummary> summary;  // one row per method
  double expert_mean = 0.0;            // demonstration-set mean return
  std::string summary_csv, curves_svg;
};

// methods x seeds on a fixed demo file; emits per-cell metric CSVs, a summary
// table, and a combined curve figure with an expert reference line.
CompareOutput cmd_compare(const ExperimentManifest& m);

struct SweepOutput {
  std::vector<double> ratios;  // 0.0, 0.1, ..., 1.0
  // baseline label -> improvement of the joint method per ratio:
  // (reward_lfnd - reward_baseline) / max(|reward_baseline|, 1e-6)
  std::map<std::string, std::vector<double>> improvement;
  std::string improvement_csv, bars_svg;
};

// Regenerates demos per noise ratio from the expert/immature checkpoints and
// compares the methods at every ratio. Exploration-only cells are reused
// across ratios since they never read the demo file.
SweepOutput cmd_noise_sweep(const ExperimentManifest& m);

struct DecileRow {
  std::uint64_t seed = 0;
  int group = 0;  // 1 = lowest average weight, 10 = highest
  std::size_t size = 0;
  double mean_weight = 0.0;
  double il_mean = 0.0, il_max = 0.0, il_final = 0.0;
  double noisy_fraction = 0.0;  // ground-truth noisy instances in the group
};

struct WeightGroupsOutput {
  std::vector<DecileRow> rows;  // 10 per seed
  std::string deciles_csv, figure_svg;
};

// Per seed: run the joint method with per-iteration weight dumping, average
// each instance's weight over the run, split instances into 10 equal-size
// groups by that average, and train imitation-only on each group.
WeightGroupsOutput cmd_weight_groups(const ExperimentManifest& m);

struct WeightFormsOutput {
  std::vector<MethodSummary> summary;  // onezero, linear10, linear20, log, rl
  std::string summary_csv, curves_svg;
};

// Joint training under each weighting strategy plus an exploration-only
// baseline. Weight records are dumped for every joint cell.
WeightFormsOutput cmd_weight_forms(const ExperimentManifest& m);

// Rebuild the figures and summary tables of a completed manifest from its
// CSV artifacts without running any cells.
void cmd_render(const ExperimentManifest& m);

}  // namespace dwrl
