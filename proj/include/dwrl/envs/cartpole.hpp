#pragma once

#include <array>

#include "dwrl/env.hpp"

namespace dwrl::envs {

// Classic pole-balancing cart with Euler-integrated dynamics.
//
//   - State (x, x_dot, theta, theta_dot), each initialized uniformly in
//     [-0.05, 0.05] at reset.
//   - Actions: 0 pushes left, 1 pushes right, force 10 N, dt = 0.02 s.
//   - Reward +1 every step, including the terminating one.
//   - Episode ends when |x| > 2.4, |theta| > ~12 deg, or after 500 steps.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kLength = 0.5;  // half pole length
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXThreshold = 2.4;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr int kMaxSteps = 500;

  CartPole();

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;
  bool episode_done() const override { return done_; }
  int steps_taken() const override { return steps_; }
  EnvSnapshot snapshot() const override;
  void restore(const EnvSnapshot& snap) override;

 private:
  EnvSpec spec_;
  std::array<double, 4> state_{};
  int steps_ = 0;
  bool done_ = true;
  RngStream rng_;
};

}  // namespace dwrl::envs
