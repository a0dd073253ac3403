#pragma once

#include <string>
#include <vector>

#include "dwrl/demos.hpp"
#include "dwrl/mlp.hpp"

namespace dwrl {

// Per-instance utility weight as a function of gap = q_sigma - v_estimate:
//
//   one_zero     1 if gap >= 0, else 0
//   linear       max(gap / delta, 0)
//   log          ln(max(gap, 1))
//   constant_one 1 regardless of the gap (used by the no-weighting ablation)
struct WeightForm {
  enum class Kind { kOneZero, kLinear, kLog, kConstantOne };

  Kind kind = Kind::kLinear;
  double delta = 10.0;  // linear only, > 0

  static WeightForm one_zero() { return {Kind::kOneZero, 0.0}; }
  static WeightForm linear(double delta);
  static WeightForm log() { return {Kind::kLog, 0.0}; }
  static WeightForm constant_one() { return {Kind::kConstantOne, 0.0}; }

  // "onezero" | "linear" | "linear<delta>" | "log" | "constant1"
  static WeightForm parse(const std::string& text);
  std::string name() const;

  bool operator==(const WeightForm&) const = default;
};

double compute_weight(double q_sigma, double v_estimate, const WeightForm& form);

struct WeightRecord {
  std::string trajectory_id;
  int step_index = 0;  // 0-based position within the trajectory
  double q_sigma = 0.0;
  double v_estimate = 0.0;
  double weight = 0.0;
  int iteration = 0;
};

// One record per instance, ordered by trajectory then step. q_sigma comes
// from the recorded rewards alone; v_estimate from a batched value-net
// forward over all instance states.
std::vector<WeightRecord> weigh_demoset(const DemoSet& demos, const MlpParams& value_net,
                                        const WeightForm& form, int iteration, int threads = 0);

}  // namespace dwrl
