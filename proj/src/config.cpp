#include "dwrl/config.hpp"

#include <fstream>
#include <sstream>

#include "dwrl/error.hpp"

namespace dwrl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' (expected " +
                    expected + ")");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    bad_value(key, value, "an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    bad_value(key, value, "a non-negative integer");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_int(key, trim(item)));
  }
  if (out.empty()) bad_value(key, value, "comma-separated integers");
  return out;
}

}  // namespace

void apply_train_kv(TrainConfig& config, const std::string& key, const std::string& value) {
  if (key == "env") {
    config.env_id = value;
  } else if (key == "mode") {
    config.mode = mode_from_name(value);
  } else if (key == "pretrain_iters") {
    config.pretrain_iters = parse_int(key, value);
  } else if (key == "weight_form") {
    config.weight_form = WeightForm::parse(value);
  } else if (key == "lambda") {
    config.loss.lambda_tradeoff = parse_double(key, value);
  } else if (key == "gamma") {
    config.loss.gamma = parse_double(key, value);
  } else if (key == "gae_lambda") {
    config.loss.gae_lambda = parse_double(key, value);
  } else if (key == "explorer") {
    if (value == "ppo") {
      double eps = 0.2;
      if (auto* p = std::get_if<Ppo>(&config.loss.explorer)) eps = p->epsilon;
      config.loss.explorer = Ppo{eps};
    } else if (value == "trpo") {
      double beta = 0.01;
      if (auto* t = std::get_if<TrpoPenalty>(&config.loss.explorer)) beta = t->beta;
      config.loss.explorer = TrpoPenalty{beta};
    } else {
      bad_value(key, value, "ppo or trpo");
    }
  } else if (key == "ppo_epsilon") {
    const double eps = parse_double(key, value);
    if (auto* p = std::get_if<Ppo>(&config.loss.explorer)) {
      p->epsilon = eps;
    } else {
      config.loss.explorer = Ppo{eps};
    }
  } else if (key == "trpo_beta") {
    const double beta = parse_double(key, value);
    if (auto* t = std::get_if<TrpoPenalty>(&config.loss.explorer)) {
      t->beta = beta;
    } else {
      config.loss.explorer = TrpoPenalty{beta};
    }
  } else if (key == "standardize_advantages") {
    config.loss.standardize_advantages = parse_bool(key, value);
  } else if (key == "iterations") {
    config.iterations = parse_int(key, value);
  } else if (key == "steps_per_iteration") {
    config.steps_per_iteration = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else if (key == "demo_path") {
    config.demo_path = value;
  } else if (key == "eval_episodes") {
    config.eval_episodes = parse_int(key, value);
  } else if (key == "hidden") {
    config.hidden = parse_int_list(key, value);
  } else if (key == "final_layer_scale") {
    config.final_layer_scale = parse_double(key, value);
  } else if (key == "policy_lr") {
    config.policy_lr = parse_double(key, value);
  } else if (key == "value_lr") {
    config.value_lr = parse_double(key, value);
  } else if (key == "value_epochs") {
    config.value_epochs = parse_int(key, value);
  } else if (key == "n_envs") {
    config.n_envs = parse_int(key, value);
  } else if (key == "threads") {
    config.threads = parse_int(key, value);
  } else if (key == "weighted_il") {
    config.weighted_il = parse_bool(key, value);
  } else if (key == "metrics_path") {
    config.metrics_path = value;
  } else if (key == "weight_dump_path") {
    config.weight_dump_path = value;
  } else if (key == "checkpoint_path") {
    config.checkpoint_path = value;
  } else if (key == "resume_path") {
    config.resume_path = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_train_config_file(TrainConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    try {
      apply_train_kv(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace dwrl
