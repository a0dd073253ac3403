#include "dwrl/envs/gridworld.hpp"

#include "dwrl/error.hpp"

namespace dwrl::envs {

GridWorld::GridWorld() {
  spec_.id = "gridworld8";
  spec_.obs_dim = kRows * kCols;
  spec_.action_space = DiscreteSpace{4};
  spec_.max_episode_steps = kMaxSteps;
  spec_.reward_range = {kStepPenalty, kGoalReward};
}

std::vector<double> GridWorld::observation() const {
  std::vector<double> obs(static_cast<std::size_t>(kRows * kCols), 0.0);
  obs[static_cast<std::size_t>(row_ * kCols + col_)] = 1.0;
  return obs;
}

std::vector<double> GridWorld::reset(std::uint64_t /*seed*/) {
  // Fixed start cell; the seed is accepted for interface uniformity.
  row_ = kStartRow;
  col_ = kStartCol;
  steps_ = 0;
  done_ = false;
  return observation();
}

StepResult GridWorld::step(const Action& action) {
  if (done_) throw StateError("gridworld8: step called on a finished episode");
  const int a = action.index();
  if (a < 0 || a >= 4) {
    throw DomainError("gridworld8: action " + std::to_string(a) + " outside Discrete(4)");
  }
  static constexpr int dr[4] = {-1, 1, 0, 0};
  static constexpr int dc[4] = {0, 0, -1, 1};
  const int nr = row_ + dr[a];
  const int nc = col_ + dc[a];
  const bool blocked = nr < 0 || nr >= kRows || nc < 0 || nc >= kCols || obstacle(nr, nc);
  if (!blocked) {
    row_ = nr;
    col_ = nc;
  }
  steps_ += 1;

  StepResult result;
  const bool at_goal = (row_ == kGoalRow && col_ == kGoalCol);
  result.reward = at_goal ? kGoalReward : kStepPenalty;
  result.done = at_goal || steps_ >= kMaxSteps;
  done_ = result.done;
  result.observation = observation();
  return result;
}

EnvSnapshot GridWorld::snapshot() const {
  EnvSnapshot snap;
  snap.state = {static_cast<double>(row_), static_cast<double>(col_)};
  snap.steps = steps_;
  snap.done = done_;
  return snap;
}

void GridWorld::restore(const EnvSnapshot& snap) {
  if (snap.state.size() != 2) throw StateError("gridworld8: bad snapshot");
  row_ = static_cast<int>(snap.state[0]);
  col_ = static_cast<int>(snap.state[1]);
  steps_ = snap.steps;
  done_ = snap.done;
}

}  // namespace dwrl::envs
