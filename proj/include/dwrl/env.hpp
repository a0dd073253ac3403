#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dwrl/error.hpp"
#include "dwrl/rng.hpp"

namespace dwrl {

struct DiscreteSpace {
  int n = 0;  // n >= 2
};

struct BoxSpace {
  int dim = 0;
  std::vector<double> low, high;  // low < high elementwise
};

using ActionSpace = std::variant<DiscreteSpace, BoxSpace>;

inline bool is_discrete(const ActionSpace& s) { return std::holds_alternative<DiscreteSpace>(s); }
inline int action_dim(const ActionSpace& s) {
  if (auto* d = std::get_if<DiscreteSpace>(&s)) return d->n;
  return std::get<BoxSpace>(s).dim;
}

struct EnvSpec {
  std::string id;
  int obs_dim = 0;
  ActionSpace action_space;
  int max_episode_steps = 0;
  std::pair<double, double> reward_range{0.0, 0.0};
};

// Either a discrete action index or a continuous action vector.
struct Action {
  std::variant<int, std::vector<double>> value;

  static Action discrete(int a) { return Action{a}; }
  static Action continuous(std::vector<double> a) { return Action{std::move(a)}; }
  int index() const {
    if (auto* i = std::get_if<int>(&value)) return *i;
    throw DomainError("discrete action expected, got a continuous one");
  }
  const std::vector<double>& vec() const {
    if (auto* v = std::get_if<std::vector<double>>(&value)) return *v;
    throw DomainError("continuous action expected, got a discrete one");
  }

  bool operator==(const Action&) const = default;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  bool action_clipped = false;  // continuous action was clipped to bounds
};

// Full state of an environment instance, for checkpoint/resume.
struct EnvSnapshot {
  std::vector<double> state;
  int steps = 0;
  bool done = true;
  std::string rng;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Action& action) = 0;
  virtual bool episode_done() const = 0;
  virtual int steps_taken() const = 0;
  virtual EnvSnapshot snapshot() const = 0;
  virtual void restore(const EnvSnapshot& snap) = 0;
};

// Environments by string id: "gridworld8", "cartpole", "pointmass".
std::unique_ptr<Environment> make_env(const std::string& id);
std::vector<std::string> env_ids();

}  // namespace dwrl
