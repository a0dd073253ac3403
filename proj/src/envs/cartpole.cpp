#include "dwrl/envs/cartpole.hpp"

#include <cmath>

#include "dwrl/error.hpp"

namespace dwrl::envs {

CartPole::CartPole() {
  spec_.id = "cartpole";
  spec_.obs_dim = 4;
  spec_.action_space = DiscreteSpace{2};
  spec_.max_episode_steps = kMaxSteps;
  spec_.reward_range = {1.0, 1.0};
}

std::vector<double> CartPole::reset(std::uint64_t seed) {
  rng_ = RngStream::named(seed, "cartpole/reset");
  for (auto& v : state_) v = rng_.uniform(-0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return {state_.begin(), state_.end()};
}

StepResult CartPole::step(const Action& action) {
  if (done_) throw StateError("cartpole: step called on a finished episode");
  const int a = action.index();
  if (a < 0 || a >= 2) {
    throw DomainError("cartpole: action " + std::to_string(a) + " outside Discrete(2)");
  }
  auto [x, x_dot, theta, theta_dot] = state_;
  const double force = a == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double total_mass = kMassCart + kMassPole;
  const double polemass_length = kMassPole * kLength;

  const double temp = (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

  x += kTau * x_dot;
  x_dot += kTau * x_acc;
  theta += kTau * theta_dot;
  theta_dot += kTau * theta_acc;
  state_ = {x, x_dot, theta, theta_dot};
  steps_ += 1;

  StepResult result;
  const bool fell = x < -kXThreshold || x > kXThreshold || theta < -kThetaThreshold ||
                    theta > kThetaThreshold;
  result.reward = 1.0;
  result.done = fell || steps_ >= kMaxSteps;
  done_ = result.done;
  result.observation = {state_.begin(), state_.end()};
  return result;
}

EnvSnapshot CartPole::snapshot() const {
  EnvSnapshot snap;
  snap.state = {state_.begin(), state_.end()};
  snap.steps = steps_;
  snap.done = done_;
  snap.rng = rng_.serialize();
  return snap;
}

void CartPole::restore(const EnvSnapshot& snap) {
  if (snap.state.size() != 4) throw StateError("cartpole: bad snapshot");
  for (std::size_t i = 0; i < 4; ++i) state_[i] = snap.state[i];
  steps_ = snap.steps;
  done_ = snap.done;
  rng_ = RngStream::deserialize(snap.rng);
}

}  // namespace dwrl::envs
