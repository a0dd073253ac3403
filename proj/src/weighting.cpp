#include "dwrl/weighting.hpp"

#include <cmath>

#include "dwrl/error.hpp"

namespace dwrl {

WeightForm WeightForm::linear(double delta) {
  if (!(delta > 0.0)) {
    throw DomainError("WeightForm::linear: delta must be > 0, got " + std::to_string(delta));
  }
  return {Kind::kLinear, delta};
}

WeightForm WeightForm::parse(const std::string& text) {
  if (text == "onezero") return one_zero();
  if (text == "log") return log();
  if (text == "constant1") return constant_one();
  if (text.rfind("linear", 0) == 0) {
    const std::string rest = text.substr(6);
    if (rest.empty()) return linear(10.0);
    bool numeric = false;
    double delta = 0.0;
    try {
      std::size_t used = 0;
      delta = std::stod(rest, &used);
      numeric = (used == rest.size());
    } catch (const std::exception&) {
    }
    if (numeric) return linear(delta);
  }
  throw ConfigError("unknown weight form '" + text +
                    "' (expected onezero, linear, linear<delta>, log, or constant1)");
}

std::string WeightForm::name() const {
  switch (kind) {
    case Kind::kOneZero:
      return "onezero";
    case Kind::kLinear: {
      // Integral deltas print without a trailing ".000000".
      if (delta == std::floor(delta)) {
        return "linear" + std::to_string(static_cast<long long>(delta));
      }
      return "linear" + std::to_string(delta);
    }
    case Kind::kLog:
      return "log";
    case Kind::kConstantOne:
      return "constant1";
  }
  throw StateError("WeightForm::name: bad kind");
}

double compute_weight(double q_sigma, double v_estimate, const WeightForm& form) {
  if (!std::isfinite(q_sigma) || !std::isfinite(v_estimate)) {
    throw NumericError("compute_weight: non-finite input (q=" + std::to_string(q_sigma) +
                       ", v=" + std::to_string(v_estimate) + ")");
  }
  const double gap = q_sigma - v_estimate;
  switch (form.kind) {
    case WeightForm::Kind::kOneZero:
      return gap >= 0.0 ? 1.0 : 0.0;
    case WeightForm::Kind::kLinear:
      return std::max(gap / form.delta, 0.0);
    case WeightForm::Kind::kLog:
      return std::log(std::max(gap, 1.0));
    case WeightForm::Kind::kConstantOne:
      return 1.0;
  }
  throw StateError("compute_weight: bad weight form");
}

std::vector<WeightRecord> weigh_demoset(const DemoSet& demos, const MlpParams& value_net,
                                        const WeightForm& form, int iteration, int threads) {
  const auto total = demos.instance_count();
  if (total == 0) throw DomainError("weigh_demoset: empty demonstration set");
  const auto obs_dim = static_cast<std::int64_t>(demos.trajectories.front().instances.front().state.size());
  if (value_net.input_dim() != obs_dim) {
    throw DimensionError("weigh_demoset: value net expects input width " +
                         std::to_string(value_net.input_dim()) + ", states have " +
                         std::to_string(obs_dim));
  }

  Tensor states({static_cast<std::int64_t>(total), obs_dim});
  std::size_t row = 0;
  for (const auto& traj : demos.trajectories) {
    for (const auto& inst : traj.instances) {
      if (static_cast<std::int64_t>(inst.state.size()) != obs_dim) {
        throw DimensionError("weigh_demoset: inconsistent state widths in demo set");
      }
      std::copy(inst.state.begin(), inst.state.end(),
                states.data.begin() + static_cast<std::ptrdiff_t>(row * static_cast<std::size_t>(obs_dim)));
      ++row;
    }
  }
  const auto values = value_forward(value_net, states, threads);

  std::vector<WeightRecord> records;
  records.reserve(total);
  std::size_t idx = 0;
  for (const auto& traj : demos.trajectories) {
    for (std::size_t j = 0; j < traj.length(); ++j) {
      WeightRecord rec;
      rec.trajectory_id = traj.id;
      rec.step_index = static_cast<int>(j);
      rec.q_sigma = mc_return(traj, j, demos.gamma);
      rec.v_estimate = values[idx];
      rec.weight = compute_weight(rec.q_sigma, rec.v_estimate, form);
      rec.iteration = iteration;
      records.push_back(std::move(rec));
      ++idx;
    }
  }
  return records;
}

}  // namespace dwrl
