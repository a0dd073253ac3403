#pragma once

#include <array>
#include <cstdint>

#include "dwrl/env.hpp"

namespace dwrl::envs {

// 8x8 grid with two partial walls, deterministic dynamics.
//
//   - Cells are (row, col), row 0 at the top. Start (0,0), goal (7,7).
//   - Actions: 0=up, 1=down, 2=left, 3=right. Moving into a wall, obstacle
//     or border leaves the position unchanged.
//   - Reward: +1.0 on the step that enters the goal, -0.01 otherwise.
//   - Episode ends at the goal or after 100 steps.
//   - Observation: 64-dim one-hot of the current cell.
//
// Obstacles: column 2 rows 1..6 and column 5 rows 1..6, leaving the top and
// bottom rows open. The shortest start-to-goal path is 14 steps along row 0
// and column 7, for an undiscounted optimal return of 1 - 13 * 0.01 = 0.87.
class GridWorld final : public Environment {
 public:
  static constexpr int kRows = 8;
  static constexpr int kCols = 8;
  static constexpr int kStartRow = 0, kStartCol = 0;
  static constexpr int kGoalRow = 7, kGoalCol = 7;
  static constexpr double kStepPenalty = -0.01;
  static constexpr double kGoalReward = 1.0;
  static constexpr int kMaxSteps = 100;

  GridWorld();

  static bool obstacle(int row, int col) {
    return (col == 2 || col == 5) && row >= 1 && row <= 6;
  }

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  bool episode_done() const override { return done_; }
  int steps_taken() const override { return steps_; }
  EnvSnapshot snapshot() const override;
  void restore(const EnvSnapshot& snap) override;

 private:
  std::vector<double> observation() const;

  EnvSpec spec_;
  int row_ = kStartRow, col_ = kStartCol;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace dwrl::envs
