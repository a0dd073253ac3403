#include "dwrl/demos.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "dwrl/error.hpp"
#include "dwrl/policy.hpp"
#include "json.hpp"

namespace dwrl {

namespace {

using nlohmann::json;

void require_policy_env_match(const MlpParams& policy, const EnvSpec& spec,
                              const std::string& who) {
  if (policy.input_dim() != spec.obs_dim) {
    throw DomainError(who + ": policy input width " + std::to_string(policy.input_dim()) +
                      " != observation size " + std::to_string(spec.obs_dim));
  }
  const bool discrete = is_discrete(spec.action_space);
  if (discrete && policy.head != Head::kSoftmax) {
    throw DomainError(who + ": discrete environment needs a softmax policy head");
  }
  if (!discrete && policy.head != Head::kGaussian) {
    throw DomainError(who + ": continuous environment needs a gaussian policy head");
  }
  if (policy.output_dim() != action_dim(spec.action_space)) {
    throw DomainError(who + ": policy output width " + std::to_string(policy.output_dim()) +
                      " != action dimension " + std::to_string(action_dim(spec.action_space)));
  }
}

// Roll one full episode; every instance carries the given noisy flag.
Trajectory roll_episode(const MlpParams& policy, Environment& env, std::uint64_t env_seed,
                        RngStream& sample, const std::string& id, bool noisy) {
  Trajectory traj;
  traj.id = id;
  auto obs = env.reset(env_seed);
  for (;;) {
    auto dist = policy_distribution(policy, obs);
    Action a = sample_action(dist, sample);
    auto r = env.step(a);
    DemoInstance inst;
    inst.state = obs;
    inst.expert_action = a;
    if (dist.head == Head::kSoftmax) inst.action_probs = dist.probs;
    inst.reward = r.reward;
    inst.is_noisy = noisy;
    traj.instances.push_back(std::move(inst));
    if (r.done) break;
    obs = r.observation;
  }
  return traj;
}

// Epsilon-mixture episode: the demonstrator follows the policy but acts
// uniformly at random with probability eps. Discrete steps record the mixture
// distribution; continuous steps record the executed action.
Trajectory roll_epsilon_episode(const MlpParams& policy, double eps, Environment& env,
                                std::uint64_t env_seed, RngStream& sample, const std::string& id) {
  Trajectory traj;
  traj.id = id;
  auto obs = env.reset(env_seed);
  for (;;) {
    auto dist = policy_distribution(policy, obs);
    Action a = Action::discrete(0);
    DemoInstance inst;
    if (dist.head == Head::kSoftmax) {
      const auto n = dist.probs.size();
      std::vector<double> mixed(n);
      for (std::size_t i = 0; i < n; ++i) {
        mixed[i] = (1.0 - eps) * dist.probs[i] + eps / static_cast<double>(n);
      }
      ActionDistribution noisy_dist;
      noisy_dist.head = Head::kSoftmax;
      noisy_dist.probs = mixed;
      a = sample_action(noisy_dist, sample);
      inst.action_probs = std::move(mixed);
    } else {
      if (sample.uniform() < eps) {
        const auto& box = std::get<BoxSpace>(env.spec().action_space);
        std::vector<double> rand_a(static_cast<std::size_t>(box.dim));
        for (int i = 0; i < box.dim; ++i) {
          rand_a[static_cast<std::size_t>(i)] =
              sample.uniform(box.low[static_cast<std::size_t>(i)],
                             box.high[static_cast<std::size_t>(i)]);
        }
        a = Action::continuous(std::move(rand_a));
      } else {
        a = sample_action(dist, sample);
      }
    }
    auto r = env.step(a);
    inst.state = obs;
    inst.expert_action = a;
    inst.reward = r.reward;
    inst.is_noisy = true;
    traj.instances.push_back(std::move(inst));
    if (r.done) break;
    obs = r.observation;
  }
  return traj;
}

json instance_to_json(const DemoInstance& inst) {
  json j;
  j["state"] = inst.state;
  if (std::holds_alternative<int>(inst.expert_action.value)) {
    j["action"] = std::get<int>(inst.expert_action.value);
  } else {
    j["action"] = std::get<std::vector<double>>(inst.expert_action.value);
  }
  if (!inst.action_probs.empty()) j["probs"] = inst.action_probs;
  j["reward"] = inst.reward;
  j["noisy"] = inst.is_noisy;
  return j;
}

DemoInstance instance_from_json(const json& j) {
  DemoInstance inst;
  inst.state = j.at("state").get<std::vector<double>>();
  const auto& a = j.at("action");
  if (a.is_number_integer()) {
    inst.expert_action = Action::discrete(a.get<int>());
  } else if (a.is_array()) {
    inst.expert_action = Action::continuous(a.get<std::vector<double>>());
  } else {
    throw ParseError("action must be an integer or an array");
  }
  if (j.contains("probs")) {
    inst.action_probs = j.at("probs").get<std::vector<double>>();
    double sum = std::accumulate(inst.action_probs.begin(), inst.action_probs.end(), 0.0);
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw ParseError("probability vector sums to " + std::to_string(sum) + ", expected 1");
    }
  }
  inst.reward = j.at("reward").get<double>();
  inst.is_noisy = j.at("noisy").get<bool>();
  return inst;
}

}  // namespace

double Trajectory::undiscounted_return() const {
  double sum = 0.0;
  for (const auto& inst : instances) sum += inst.reward;
  return sum;
}

std::size_t DemoSet::instance_count() const {
  std::size_t n = 0;
  for (const auto& traj : trajectories) n += traj.length();
  return n;
}

DemoSet generate_demos(const MlpParams& policy, Environment& env, int count, std::uint64_t seed,
                       double gamma) {
  if (count < 1) throw DomainError("generate_demos: count must be >= 1, got " + std::to_string(count));
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("generate_demos: gamma must lie in [0,1)");
  }
  require_policy_env_match(policy, env.spec(), "generate_demos");

  DemoSet out;
  out.env_id = env.spec().id;
  out.gamma = gamma;
  RngStream sample = RngStream::named(seed, "demos/sample");
  const std::uint64_t env_base = splitmix64(seed ^ fnv1a64("demos/env"));
  for (int e = 0; e < count; ++e) {
    out.trajectories.push_back(roll_episode(policy, env, env_base + static_cast<std::uint64_t>(e),
                                            sample, "demo-" + std::to_string(e), false));
  }
  return out;
}

DemoSet corrupt(const DemoSet& demos, double noise_ratio, const NoiseModel& model,
                std::uint64_t seed) {
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) {
    throw DomainError("corrupt: noise_ratio must lie in [0,1], got " + std::to_string(noise_ratio));
  }
  const auto m = demos.trajectories.size();
  if (m == 0) throw DomainError("corrupt: empty demonstration set");
  const auto k = static_cast<std::size_t>(
      std::llround(noise_ratio * static_cast<double>(m)));
  DemoSet out = demos;
  if (k == 0) return out;

  // Seed-stable shuffle; the first k entries are replaced.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  RngStream pick = RngStream::named(seed, "corrupt/select");
  for (std::size_t i = m - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(pick.randint(static_cast<std::int64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  auto env = make_env(demos.env_id);
  RngStream sample = RngStream::named(seed, "corrupt/sample");
  const std::uint64_t env_base = splitmix64(seed ^ fnv1a64("corrupt/env"));
  for (std::size_t t = 0; t < k; ++t) {
    auto& victim = out.trajectories[order[t]];
    if (const auto* immature = std::get_if<ImmatureAgent>(&model)) {
      require_policy_env_match(immature->policy, env->spec(), "corrupt");
      victim = roll_episode(immature->policy, *env, env_base + t, sample, victim.id, true);
    } else {
      const auto& er = std::get<EpsilonRandom>(model);
      if (!(er.eps >= 0.0 && er.eps <= 1.0)) {
        throw DomainError("corrupt: eps must lie in [0,1]");
      }
      require_policy_env_match(er.policy, env->spec(), "corrupt");
      victim = roll_epsilon_episode(er.policy, er.eps, *env, env_base + t, sample, victim.id);
    }
  }
  return out;
}

double mc_return(const Trajectory& traj, std::size_t j, double gamma) {
  if (j >= traj.instances.size()) {
    throw DomainError("mc_return: step " + std::to_string(j) + " out of range for a " +
                      std::to_string(traj.instances.size()) + "-step trajectory");
  }
  double acc = 0.0;
  double disc = 1.0;
  for (std::size_t k = j; k < traj.instances.size(); ++k) {
    acc += disc * traj.instances[k].reward;
    disc *= gamma;
  }
  return acc;
}

void save_demos(const DemoSet& demos, const std::string& path) {
  if (demos.trajectories.empty()) throw DomainError("save_demos: empty demonstration set");
  std::ofstream out(path);
  if (!out) throw StateError("save_demos: cannot open '" + path + "' for writing");
  json header;
  header["format_version"] = kDemoFormatVersion;
  header["env_id"] = demos.env_id;
  header["gamma"] = demos.gamma;
  out << header.dump() << "\n";
  for (const auto& traj : demos.trajectories) {
    json line;
    line["id"] = traj.id;
    auto& instances = line["instances"] = json::array();
    for (const auto& inst : traj.instances) instances.push_back(instance_to_json(inst));
    out << line.dump() << "\n";
  }
  if (!out) throw StateError("save_demos: write to '" + path + "' failed");
}

DemoSet load_demos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_demos: cannot open '" + path + "'");
  DemoSet out;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError("load_demos: " + path + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    try {
      if (line_no == 1) {
        const int version = j.at("format_version").get<int>();
        if (version != kDemoFormatVersion) {
          throw ParseError("unsupported format_version " + std::to_string(version) +
                           ", expected " + std::to_string(kDemoFormatVersion));
        }
        out.env_id = j.at("env_id").get<std::string>();
        out.gamma = j.at("gamma").get<double>();
        continue;
      }
      Trajectory traj;
      traj.id = j.at("id").get<std::string>();
      for (const auto& ij : j.at("instances")) traj.instances.push_back(instance_from_json(ij));
      if (traj.instances.empty()) throw ParseError("trajectory '" + traj.id + "' is empty");
      out.trajectories.push_back(std::move(traj));
    } catch (const ParseError& e) {
      throw fail(e.what());
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
  }
  if (line_no == 0) throw ParseError("load_demos: " + path + ": empty file");
  if (out.trajectories.empty()) {
    throw ParseError("load_demos: " + path + ": no trajectories after the header");
  }
  return out;
}

DemoStats demoset_stats(const DemoSet& demos) {
  if (demos.trajectories.empty()) throw DomainError("demoset_stats: empty demonstration set");
  DemoStats stats;
  double length_sum = 0.0;
  for (const auto& traj : demos.trajectories) {
    stats.returns.push_back(traj.undiscounted_return());
    length_sum += static_cast<double>(traj.length());
    bool any_noisy = false;
    for (const auto& inst : traj.instances) {
      if (inst.is_noisy) {
        ++stats.noisy_instances;
        any_noisy = true;
      }
    }
    if (any_noisy) ++stats.noisy_trajectories;
  }
  const auto m = static_cast<double>(demos.trajectories.size());
  stats.mean_return = std::accumulate(stats.returns.begin(), stats.returns.end(), 0.0) / m;
  stats.mean_length = length_sum / m;
  return stats;
}

}  // namespace dwrl
