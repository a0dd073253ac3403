#include "dwrl/envs/pointmass.hpp"

#include <algorithm>
#include <cmath>

#include "dwrl/error.hpp"

namespace dwrl::envs {

PointMass::PointMass() {
  spec_.id = "pointmass";
  spec_.obs_dim = 2;
  spec_.action_space = BoxSpace{2, {-1.0, -1.0}, {1.0, 1.0}};
  spec_.max_episode_steps = kMaxSteps;
  // Farthest corner is sqrt(2) from the target.
  spec_.reward_range = {-2.0 * std::sqrt(2.0), 0.0};
}

std::vector<double> PointMass::reset(std::uint64_t seed) {
  rng_ = RngStream::named(seed, "pointmass/reset");
  do {
    pos_[0] = rng_.uniform(kStartLow, kStartHigh);
    pos_[1] = rng_.uniform(kStartLow, kStartHigh);
  } while (std::hypot(pos_[0], pos_[1]) < kSuccessRadius);
  steps_ = 0;
  done_ = false;
  return {pos_.begin(), pos_.end()};
}

StepResult PointMass::step(const Action& action) {
  if (done_) throw StateError("pointmass: step called on a finished episode");
  const auto& a = action.vec();
  if (a.size() != 2) {
    throw DomainError("pointmass: action must have 2 components, got " +
                      std::to_string(a.size()));
  }
  StepResult result;
  const auto& box = std::get<BoxSpace>(spec_.action_space);
  std::array<double, 2> v{};
  for (int i = 0; i < 2; ++i) {
    v[i] = std::clamp(a[static_cast<std::size_t>(i)], box.low[i], box.high[i]);
    if (v[i] != a[static_cast<std::size_t>(i)]) result.action_clipped = true;
  }
  pos_[0] += v[0] * kDt;
  pos_[1] += v[1] * kDt;
  steps_ += 1;

  const double dist = std::hypot(pos_[0], pos_[1]);
  result.reward = -dist;
  result.done = dist < kSuccessRadius || steps_ >= kMaxSteps;
  done_ = result.done;
  result.observation = {pos_.begin(), pos_.end()};
  return result;
}

EnvSnapshot PointMass::snapshot() const {
  EnvSnapshot snap;
  snap.state = {pos_.begin(), pos_.end()};
  snap.steps = steps_;
  snap.done = done_;
  snap.rng = rng_.serialize();
  return snap;
}

void PointMass::restore(const EnvSnapshot& snap) {
  if (snap.state.size() != 2) throw StateError("pointmass: bad snapshot");
  pos_[0] = snap.state[0];
  pos_[1] = snap.state[1];
  steps_ = snap.steps;
  done_ = snap.done;
  rng_ = RngStream::deserialize(snap.rng);
}

}  // namespace dwrl::envs
