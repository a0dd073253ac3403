#include "dwrl/trainer.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "dwrl/checkpoint.hpp"
#include "dwrl/error.hpp"
#include "dwrl/policy.hpp"
#include "json.hpp"

namespace dwrl {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------- CSV plumbing

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal RFC-4180 quoting, applied only when the field needs it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

constexpr const char* kMetricsHeader =
    "iteration,mean_episode_return,loss_demo,loss_explore,mean_weight,fraction_zero_weight,"
    "wall_ms";
constexpr const char* kWeightsHeader =
    "iteration,trajectory_id,step_index,q_sigma,v_estimate,weight";

std::string metrics_row(const IterationMetrics& m) {
  std::ostringstream os;
  os << m.iteration << ',' << fmt_double(m.mean_episode_return) << ',' << fmt_double(m.loss_demo)
     << ',' << fmt_double(m.loss_explore) << ',' << fmt_double(m.mean_weight) << ','
     << fmt_double(m.fraction_zero_weight) << ',' << m.wall_ms;
  return os.str();
}

double parse_csv_double(const std::string& s, const std::string& path, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad numeric field '" + s + "'");
  }
}

long long parse_csv_int(const std::string& s, const std::string& path, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line) + ": bad integer field '" + s + "'");
  }
}

// Opens for appending, writing the header first when the file is new/empty.
std::ofstream open_csv_append(const std::string& path, const char* header) {
  const bool have_content = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw StateError("cannot open '" + path + "' for writing");
  if (!have_content) out << header << '\n';
  return out;
}

// ------------------------------------------------------------- rollout slots

// One independent rollout instance: environment plus the streams that drive
// its episode reseeding and action sampling. Episodes persist across
// iteration boundaries.
struct EnvSlot {
  std::unique_ptr<Environment> env;
  RngStream reset_stream;
  RngStream action_stream;
  std::vector<double> obs;
};

json snapshot_to_json(const EnvSnapshot& snap) {
  return json{{"state", snap.state}, {"steps", snap.steps}, {"done", snap.done}, {"rng", snap.rng}};
}

EnvSnapshot snapshot_from_json(const json& j) {
  EnvSnapshot snap;
  snap.state = j.at("state").get<std::vector<double>>();
  snap.steps = j.at("steps").get<int>();
  snap.done = j.at("done").get<bool>();
  snap.rng = j.at("rng").get<std::string>();
  return snap;
}

// --------------------------------------------------------------- the trainer

bool mode_uses_demos(Mode mode) { return mode != Mode::kRlOnly; }

// Whether any iteration of this run interacts with the environment for
// training. A zero exploration trade-off makes the joint modes degenerate to
// weighted imitation, so rollouts would be dead weight.
bool mode_ever_explores(const TrainConfig& c) {
  switch (c.mode) {
    case Mode::kRlOnly: return true;
    case Mode::kIlOnly: return false;
    case Mode::kLba: return c.iterations > c.pretrain_iters;
    case Mode::kLfndNoW:
    case Mode::kLfnd: return c.loss.lambda_tradeoff > 0.0;
  }
  return false;
}

struct IterationPlan {
  bool use_demo = false;
  bool use_explore = false;
  WeightForm form;  // only meaningful when use_demo
};

IterationPlan plan_iteration(const TrainConfig& c, int iteration) {
  IterationPlan p;
  switch (c.mode) {
    case Mode::kRlOnly:
      p.use_explore = true;
      break;
    case Mode::kIlOnly:
      p.use_demo = true;
      p.form = c.weighted_il ? c.weight_form : WeightForm::constant_one();
      break;
    case Mode::kLba:
      if (iteration <= c.pretrain_iters) {
        p.use_demo = true;
        p.form = WeightForm::constant_one();
      } else {
        p.use_explore = true;
      }
      break;
    case Mode::kLfndNoW:
      p.use_demo = true;
      p.form = WeightForm::constant_one();
      p.use_explore = c.loss.lambda_tradeoff > 0.0;
      break;
    case Mode::kLfnd:
      p.use_demo = true;
      p.form = c.weight_form;
      p.use_explore = c.loss.lambda_tradeoff > 0.0;
      break;
  }
  return p;
}

void validate_config(const TrainConfig& c, const EnvSpec& spec, bool explores) {
  if (c.iterations <= 0) throw ConfigError("iterations must be positive");
  if (c.eval_episodes < 1) throw ConfigError("eval_episodes must be at least 1");
  if (mode_uses_demos(c.mode) && c.demo_path.empty()) {
    throw ConfigError("mode '" + mode_name(c.mode) + "' requires a demonstration file");
  }
  if (c.mode == Mode::kLba && c.pretrain_iters < 0) {
    throw ConfigError("pretrain_iters must be non-negative");
  }
  if (c.policy_lr <= 0.0 || c.value_lr <= 0.0) throw ConfigError("learning rates must be positive");
  if (c.value_epochs < 0) throw ConfigError("value_epochs must be non-negative");
  if (c.hidden.empty()) throw ConfigError("at least one hidden layer is required");
  for (int h : c.hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  if (explores) {
    const int steps =
        c.steps_per_iteration > 0 ? c.steps_per_iteration : default_steps_per_iteration(spec.id);
    if (c.n_envs < 1) throw ConfigError("n_envs must be at least 1");
    if (steps < 1) throw ConfigError("steps_per_iteration must be positive");
    if (steps % c.n_envs != 0) {
      throw ConfigError("steps_per_iteration (" + std::to_string(steps) +
                        ") must divide evenly across n_envs (" + std::to_string(c.n_envs) + ")");
    }
  }
}

void validate_demos_against_env(const DemoSet& demos, const EnvSpec& spec) {
  if (demos.env_id != spec.id) {
    throw DomainError("demonstrations were recorded on '" + demos.env_id +
                      "' but training targets '" + spec.id + "'");
  }
  for (const auto& traj : demos.trajectories) {
    for (const auto& inst : traj.instances) {
      if (inst.state.size() != static_cast<std::size_t>(spec.obs_dim)) {
        throw DomainError("demonstration state width " + std::to_string(inst.state.size()) +
                          " does not match environment observation width " +
                          std::to_string(spec.obs_dim));
      }
      if (is_discrete(spec.action_space)) {
        const int a = inst.expert_action.index();  // throws on continuous actions
        if (a < 0 || a >= action_dim(spec.action_space)) {
          throw DomainError("demonstration action " + std::to_string(a) +
                            " outside the environment's action range");
        }
      } else {
        const auto& v = inst.expert_action.vec();
        if (v.size() != static_cast<std::size_t>(action_dim(spec.action_space))) {
          throw DomainError("demonstration action width " + std::to_string(v.size()) +
                            " does not match environment action width " +
                            std::to_string(action_dim(spec.action_space)));
        }
      }
    }
  }
}

void check_same_shapes(const MlpParams& got, const MlpParams& expect, const std::string& what) {
  auto ga = got.named_tensors();
  auto ea = expect.named_tensors();
  if (got.head != expect.head || ga.size() != ea.size()) {
    throw DimensionError("checkpoint " + what + " network does not match the configured " +
                         "architecture");
  }
  for (std::size_t i = 0; i < ga.size(); ++i) {
    if (ga[i].first != ea[i].first || ga[i].second->shape != ea[i].second->shape) {
      throw DimensionError("checkpoint " + what + " tensor '" + ga[i].first +
                           "' does not match the configured architecture (" +
                           ga[i].second->shape_str() + " vs " + ea[i].second->shape_str() +
                           ")");
    }
  }
}

std::uint64_t eval_seed_for(std::uint64_t seed, int iteration) {
  return splitmix64(splitmix64(seed ^ fnv1a64("eval")) + static_cast<std::uint64_t>(iteration));
}

class Trainer {
 public:
  explicit Trainer(const TrainConfig& config) : config_(config) {
    eval_env_ = make_env(config_.env_id);
    const EnvSpec& spec = eval_env_->spec();
    explores_ = mode_ever_explores(config_);
    validate_config(config_, spec, explores_);
    if (config_.steps_per_iteration <= 0) {
      config_.steps_per_iteration = default_steps_per_iteration(spec.id);
    }

    if (mode_uses_demos(config_.mode)) {
      demos_ = load_demos(config_.demo_path);
      validate_demos_against_env(demos_, spec);
    }

    const bool discrete = is_discrete(spec.action_space);
    const Head head = discrete ? Head::kSoftmax : Head::kGaussian;
    RngStream policy_init = RngStream::named(config_.seed, "init/policy");
    RngStream value_init = RngStream::named(config_.seed, "init/value");
    policy_ = make_mlp(spec.obs_dim, config_.hidden, action_dim(spec.action_space), head,
                       policy_init, config_.final_layer_scale);
    value_net_ = make_mlp(spec.obs_dim, config_.hidden, 1, Head::kLinear, value_init);
    policy_opt_ = AdamState::zeros_like(policy_);
    value_opt_ = AdamState::zeros_like(value_net_);

    if (explores_) {
      for (int e = 0; e < config_.n_envs; ++e) {
        EnvSlot slot;
        slot.env = make_env(config_.env_id);
        slot.reset_stream =
            RngStream::named(config_.seed, "rollout/reset/" + std::to_string(e));
        slot.action_stream =
            RngStream::named(config_.seed, "rollout/action/" + std::to_string(e));
        slot.obs = slot.env->reset(slot.reset_stream.raw());
        slots_.push_back(std::move(slot));
      }
    }

    if (!config_.resume_path.empty()) restore_from(config_.resume_path);
  }

  TrainResult run() {
    // Fresh runs start their artifact files over; resumed runs append.
    if (config_.resume_path.empty()) {
      if (!config_.metrics_path.empty()) std::filesystem::remove(config_.metrics_path);
      if (!config_.weight_dump_path.empty()) std::filesystem::remove(config_.weight_dump_path);
    }

    TrainResult result;
    for (int iteration = completed_ + 1; iteration <= config_.iterations; ++iteration) {
      const auto t0 = std::chrono::steady_clock::now();
      IterationMetrics m;
      m.iteration = iteration;
      try {
        run_iteration(iteration, m);
      } catch (const NumericError& err) {
        dump_diagnostic(iteration, err.what());
        throw NumericError("iteration " + std::to_string(iteration) + ": " + err.what());
      }
      m.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      result.metrics.push_back(m);
      if (!config_.metrics_path.empty()) append_metrics_csv(config_.metrics_path, m);
      completed_ = iteration;
    }

    if (!config_.checkpoint_path.empty()) save_to(config_.checkpoint_path);
    result.policy = policy_;
    result.value_net = value_net_;
    result.env_steps = env_steps_;
    return result;
  }

 private:
  void run_iteration(int iteration, IterationMetrics& m) {
    const IterationPlan plan = plan_iteration(config_, iteration);

    RolloutBatch batch;
    if (plan.use_explore) {
      collect(batch);
      compute_advantages(batch, value_net_, config_.loss.gamma, config_.loss.gae_lambda,
                         config_.loss.standardize_advantages, config_.threads);
    }

    std::vector<WeightRecord> weights;
    LossResult demo_part;
    if (plan.use_demo) {
      weights = weigh_demoset(demos_, value_net_, plan.form, iteration, config_.threads);
      demo_part = demo_loss(demos_, weights, policy_, config_.threads);
      if (!config_.weight_dump_path.empty()) {
        append_weight_records_csv(config_.weight_dump_path, weights);
      }
    }

    LossResult explore_part;
    if (plan.use_explore) {
      explore_part = explore_loss(batch, policy_, config_.loss.explorer, config_.threads);
    }

    m.loss_demo = plan.use_demo ? demo_part.loss : 0.0;
    m.loss_explore = plan.use_explore ? explore_part.loss : 0.0;

    LossResult total;
    if (plan.use_demo && plan.use_explore) {
      total = joint_loss(demo_part, explore_part, config_.loss.lambda_tradeoff);
    } else if (plan.use_demo) {
      total = std::move(demo_part);
    } else {
      total = std::move(explore_part);
    }
    if (!std::isfinite(total.loss)) {
      throw NumericError("non-finite training loss " + std::to_string(total.loss));
    }
    adam_step(policy_, total.grads, policy_opt_, config_.policy_lr);

    if (plan.use_explore) {
      update_value_net(value_net_, value_opt_, batch, config_.value_lr, config_.value_epochs,
                       config_.threads);
      env_steps_ += static_cast<std::int64_t>(batch.size());
    }

    const EvalResult ev =
        evaluate(policy_, *eval_env_, config_.eval_episodes, eval_seed_for(config_.seed, iteration));
    m.mean_episode_return = ev.mean;
    if (!weights.empty()) {
      double sum = 0.0;
      std::size_t zeros = 0;
      for (const auto& r : weights) {
        sum += r.weight;
        if (r.weight == 0.0) ++zeros;
      }
      m.mean_weight = sum / static_cast<double>(weights.size());
      m.fraction_zero_weight =
          static_cast<double>(zeros) / static_cast<double>(weights.size());
    }
  }

  void collect(RolloutBatch& batch) {
    const int per_slot = config_.steps_per_iteration / static_cast<int>(slots_.size());
    batch.transitions.reserve(static_cast<std::size_t>(config_.steps_per_iteration));
    for (auto& slot : slots_) {
      for (int k = 0; k < per_slot; ++k) {
        Transition tr;
        tr.state = slot.obs;
        auto dist = policy_distribution(policy_, slot.obs);
        tr.action = sample_action(dist, slot.action_stream);
        tr.log_prob = action_log_prob(dist, tr.action);
        tr.old_dist = std::move(dist);
        StepResult sr = slot.env->step(tr.action);
        tr.reward = sr.reward;
        tr.next_state = sr.observation;
        tr.done = sr.done;
        if (sr.done) {
          slot.obs = slot.env->reset(slot.reset_stream.raw());
        } else {
          slot.obs = std::move(sr.observation);
        }
        batch.transitions.push_back(std::move(tr));
      }
    }
  }

  // Everything needed to continue bit-exactly: networks, optimizer moments,
  // rollout environments mid-episode, and the streams that drive them.
  void save_to(const std::string& path) const {
    Container c;
    c.meta["format"] = "trainer";
    c.meta["version"] = "1";
    c.meta["env_id"] = config_.env_id;
    c.meta["mode"] = mode_name(config_.mode);
    c.meta["iteration"] = std::to_string(completed_);
    c.meta["env_steps"] = std::to_string(env_steps_);
    json slots = json::array();
    for (const auto& slot : slots_) {
      slots.push_back(json{{"env", snapshot_to_json(slot.env->snapshot())},
                           {"reset_rng", slot.reset_stream.serialize()},
                           {"action_rng", slot.action_stream.serialize()},
                           {"obs", slot.obs}});
    }
    c.meta["slots"] = slots.dump();
    c.put_params("policy", policy_);
    c.put_params("value", value_net_);
    c.put_adam("opt/policy", policy_opt_, policy_);
    c.put_adam("opt/value", value_opt_, value_net_);
    c.save(path);
  }

  void restore_from(const std::string& path) {
    Container c = Container::load(path);
    auto meta = [&](const char* key) -> const std::string& {
      auto it = c.meta.find(key);
      if (it == c.meta.end()) {
        throw ParseError("checkpoint '" + path + "' is missing field '" + std::string(key) + "'");
      }
      return it->second;
    };
    if (meta("format") != "trainer") {
      throw ParseError("'" + path + "' is not a trainer checkpoint");
    }
    if (meta("env_id") != config_.env_id) {
      throw ConfigError("checkpoint was trained on '" + meta("env_id") +
                        "' but the configuration targets '" + config_.env_id + "'");
    }
    if (meta("mode") != mode_name(config_.mode)) {
      throw ConfigError("checkpoint was trained in mode '" + meta("mode") +
                        "' but the configuration requests '" + mode_name(config_.mode) + "'");
    }
    MlpParams policy = c.get_params("policy");
    MlpParams value = c.get_params("value");
    check_same_shapes(policy, policy_, "policy");
    check_same_shapes(value, value_net_, "value");
    policy_ = std::move(policy);
    value_net_ = std::move(value);
    policy_opt_ = c.get_adam("opt/policy", policy_);
    value_opt_ = c.get_adam("opt/value", value_net_);
    completed_ = static_cast<int>(std::stoll(meta("iteration")));
    env_steps_ = std::stoll(meta("env_steps"));

    json slots;
    try {
      slots = json::parse(meta("slots"));
    } catch (const json::exception& e) {
      throw ParseError("checkpoint '" + path + "': malformed rollout state: " + e.what());
    }
    if (explores_) {
      if (slots.size() != slots_.size()) {
        throw ConfigError("checkpoint has " + std::to_string(slots.size()) +
                          " rollout instances but the configuration requests " +
                          std::to_string(slots_.size()));
      }
      for (std::size_t e = 0; e < slots_.size(); ++e) {
        const json& s = slots.at(e);
        slots_[e].env->restore(snapshot_from_json(s.at("env")));
        slots_[e].reset_stream = RngStream::deserialize(s.at("reset_rng").get<std::string>());
        slots_[e].action_stream = RngStream::deserialize(s.at("action_rng").get<std::string>());
        slots_[e].obs = s.at("obs").get<std::vector<double>>();
      }
    }
  }

  // Best-effort state dump next to a configured output so a crashed run can
  // be inspected; never masks the original error.
  void dump_diagnostic(int iteration, const std::string& why) const {
    std::string path;
    if (!config_.checkpoint_path.empty()) {
      path = config_.checkpoint_path + ".diagnostic";
    } else if (!config_.metrics_path.empty()) {
      path = config_.metrics_path + ".diagnostic.dwrl";
    } else {
      return;
    }
    try {
      save_to(path);
      Container c = Container::load(path);
      c.meta["diagnostic"] = "aborted at iteration " + std::to_string(iteration) + ": " + why;
      c.save(path);
    } catch (...) {
      // The original NumericError is the story; a failed dump must not hide it.
    }
  }

  TrainConfig config_;
  std::unique_ptr<Environment> eval_env_;
  bool explores_ = false;
  DemoSet demos_;
  MlpParams policy_, value_net_;
  AdamState policy_opt_, value_opt_;
  std::vector<EnvSlot> slots_;
  int completed_ = 0;
  std::int64_t env_steps_ = 0;
};

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kRlOnly: return "rl";
    case Mode::kIlOnly: return "il";
    case Mode::kLba: return "lba";
    case Mode::kLfndNoW: return "lfnd-now";
    case Mode::kLfnd: return "lfnd";
  }
  throw DomainError("unknown mode");
}

Mode mode_from_name(const std::string& name) {
  if (name == "rl") return Mode::kRlOnly;
  if (name == "il") return Mode::kIlOnly;
  if (name == "lba") return Mode::kLba;
  if (name == "lfnd-now") return Mode::kLfndNoW;
  if (name == "lfnd") return Mode::kLfnd;
  throw ConfigError("unknown mode '" + name + "' (expected rl, il, lba, lfnd-now, or lfnd)");
}

int default_steps_per_iteration(const std::string& env_id) {
  return env_id == "pointmass" ? 1024 : 2048;
}

bool same_numbers(const IterationMetrics& a, const IterationMetrics& b) {
  return a.iteration == b.iteration && a.mean_episode_return == b.mean_episode_return &&
         a.loss_demo == b.loss_demo && a.loss_explore == b.loss_explore &&
         a.mean_weight == b.mean_weight && a.fraction_zero_weight == b.fraction_zero_weight;
}

bool same_numbers(const std::vector<IterationMetrics>& a, const std::vector<IterationMetrics>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_numbers(a[i], b[i])) return false;
  }
  return true;
}

EvalResult evaluate(const MlpParams& policy, Environment& env, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw DomainError("evaluate: episodes must be at least 1");
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env.reset(splitmix64(seed + static_cast<std::uint64_t>(ep)));
    double total = 0.0;
    while (!env.episode_done()) {
      const Action a = greedy_action(policy_distribution(policy, obs));
      StepResult sr = env.step(a);
      total += sr.reward;
      obs = std::move(sr.observation);
    }
    returns.push_back(total);
  }
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= static_cast<double>(returns.size());
  return {mean, std::sqrt(var)};
}

TrainResult train(const TrainConfig& config) { return Trainer(config).run(); }

void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& metrics) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StateError("cannot open metrics file '" + path + "' for writing");
  out << kMetricsHeader << '\n';
  for (const auto& m : metrics) out << metrics_row(m) << '\n';
}

void append_metrics_csv(const std::string& path, const IterationMetrics& m) {
  auto out = open_csv_append(path, kMetricsHeader);
  out << metrics_row(m) << '\n';
}

void append_weight_records_csv(const std::string& path, const std::vector<WeightRecord>& records) {
  auto out = open_csv_append(path, kWeightsHeader);
  for (const auto& r : records) {
    out << r.iteration << ',' << csv_field(r.trajectory_id) << ',' << r.step_index << ','
        << fmt_double(r.q_sigma) << ',' << fmt_double(r.v_estimate) << ',' << fmt_double(r.weight)
        << '\n';
  }
}

std::vector<IterationMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open metrics file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty metrics file");
  if (line != kMetricsHeader) throw ParseError(path + ":1: unexpected metrics header '" + line + "'");
  std::vector<IterationMetrics> metrics;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 7 fields, found " +
                       std::to_string(fields.size()));
    }
    IterationMetrics m;
    m.iteration = static_cast<int>(parse_csv_int(fields[0], path, line_no));
    m.mean_episode_return = parse_csv_double(fields[1], path, line_no);
    m.loss_demo = parse_csv_double(fields[2], path, line_no);
    m.loss_explore = parse_csv_double(fields[3], path, line_no);
    m.mean_weight = parse_csv_double(fields[4], path, line_no);
    m.fraction_zero_weight = parse_csv_double(fields[5], path, line_no);
    m.wall_ms = parse_csv_int(fields[6], path, line_no);
    metrics.push_back(m);
  }
  return metrics;
}

std::vector<WeightRecord> read_weight_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weight dump '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty weight dump");
  if (line != kWeightsHeader) {
    throw ParseError(path + ":1: unexpected weight dump header '" + line + "'");
  }
  std::vector<WeightRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 6 fields, found " +
                       std::to_string(fields.size()));
    }
    WeightRecord r;
    r.iteration = static_cast<int>(parse_csv_int(fields[0], path, line_no));
    r.trajectory_id = fields[1];
    r.step_index = static_cast<int>(parse_csv_int(fields[2], path, line_no));
    r.q_sigma = parse_csv_double(fields[3], path, line_no);
    r.v_estimate = parse_csv_double(fields[4], path, line_no);
    r.weight = parse_csv_double(fields[5], path, line_no);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace dwrl
