#pragma once

#include <string>
#include <variant>
#include <vector>

#include "dwrl/env.hpp"
#include "dwrl/mlp.hpp"

namespace dwrl {

// One step of an expert trajectory: the state seen, the action taken (with,
// for discrete tasks, the expert's full action distribution), the reward
// received, and a ground-truth provenance flag. The flag is only ever read by
// evaluation code, never by training.
struct DemoInstance {
  std::vector<double> state;
  Action expert_action;
  std::vector<double> action_probs;  // discrete tasks: distribution over actions
  double reward = 0.0;
  bool is_noisy = false;

  bool operator==(const DemoInstance&) const = default;
};

struct Trajectory {
  std::string id;
  std::vector<DemoInstance> instances;  // ordered, first to terminal step

  std::size_t length() const { return instances.size(); }
  double undiscounted_return() const;

  bool operator==(const Trajectory&) const = default;
};

struct DemoSet {
  std::string env_id;
  double gamma = 0.99;
  std::vector<Trajectory> trajectories;

  std::size_t instance_count() const;

  bool operator==(const DemoSet&) const = default;
};

// Noise sources for corrupt(): roll whole episodes from an early-training
// checkpoint, or follow a policy that takes a uniformly random action with
// probability eps. Both re-simulate the selected episodes so the recorded
// rewards genuinely reflect the corrupted behavior.
struct ImmatureAgent {
  MlpParams policy;
};
struct EpsilonRandom {
  MlpParams policy;
  double eps = 0.0;
};
using NoiseModel = std::variant<ImmatureAgent, EpsilonRandom>;

inline constexpr int kDemoFormatVersion = 1;

// Roll `count` complete episodes of `policy` in `env`. Discrete experts
// record their full output distribution per step; continuous experts record
// the sampled action vector.
DemoSet generate_demos(const MlpParams& policy, Environment& env, int count, std::uint64_t seed,
                       double gamma);

// Replace round(noise_ratio * m) trajectories with episodes rolled under the
// noise model, keeping their ids and flagging every instance is_noisy. The
// victim choice is a seed-stable shuffle prefix, so a larger ratio corrupts a
// superset of a smaller one under the same seed.
DemoSet corrupt(const DemoSet& demos, double noise_ratio, const NoiseModel& model,
                std::uint64_t seed);

// Discounted return-to-go along the recorded trajectory from step j (0-based):
// sum_{k=j}^{n-1} gamma^(k-j) * r_k. Never consults a policy or value net.
double mc_return(const Trajectory& traj, std::size_t j, double gamma);

// JSON Lines: a header carrying {format_version, env_id, gamma}, then one
// trajectory object per line. Round-trips bit-exactly.
void save_demos(const DemoSet& demos, const std::string& path);
DemoSet load_demos(const std::string& path);

struct DemoStats {
  double mean_return = 0.0;      // undiscounted, averaged over trajectories
  std::vector<double> returns;   // per trajectory, same order
  double mean_length = 0.0;
  std::size_t noisy_trajectories = 0;
  std::size_t noisy_instances = 0;
};

DemoStats demoset_stats(const DemoSet& demos);

}  // namespace dwrl
