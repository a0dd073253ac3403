#pragma once

#include <array>

#include "dwrl/env.hpp"

namespace dwrl::envs {

// 2-D point reaching a target at the origin with velocity commands.
//
//   - Observation: current position, start drawn uniformly from
//     [-1, 1] x [-1, 1] excluding the success disc.
//   - Action: velocity in [-1, 1]^2, clipped to bounds, integrated as
//     pos' = pos + clip(action) * dt with dt = 0.1.
//   - Reward: -||pos' - target|| each step.
//   - Episode ends within 0.05 of the target or after 200 steps.
class PointMass final : public Environment {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kStartLow = -1.0;
  static constexpr double kStartHigh = 1.0;
  static constexpr double kSuccessRadius = 0.05;
  static constexpr int kMaxSteps = 200;

  PointMass();

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  bool episode_done() const override { return done_; }
  int steps_taken() const override { return steps_; }
  EnvSnapshot snapshot() const override;
  void restore(const EnvSnapshot& snap) override;

 private:
  EnvSpec spec_;
  std::array<double, 2> pos_{};
  int steps_ = 0;
  bool done_ = true;
  RngStream rng_;
};

}  // namespace dwrl::envs
