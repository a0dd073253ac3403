// Acceptance gate: one criterion per line, PASS or FAIL, exit 0 only if all
// pass. Heavy training artifacts are cached under the working directory
// (acceptance-out/) and reused across invocations via the experiment cells'
// completion checksums, so re-runs are cheap.
//
// Scale: by default runs a reduced protocol sized for a single-core sandbox;
// DWRL_ACCEPT_SCALE=full selects the full protocol (500-iteration cells,
// default rollout sizes), intended for multicore machines together with
// DWRL_THREADS.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dwrl/demos.hpp"
#include "dwrl/error.hpp"
#include "dwrl/experiment.hpp"
#include "dwrl/mlp.hpp"
#include "dwrl/policy.hpp"
#include "dwrl/policy_opt.hpp"
#include "dwrl/rng.hpp"
#include "dwrl/trainer.hpp"
#include "dwrl/weighting.hpp"

using namespace dwrl;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances and runtime budgets --------------------------------
constexpr double kGradRelTol = 1e-4;   // criterion 1: analytic vs central differences
constexpr double kGradAbsTol = 1e-8;   // criterion 1: near-zero entries
constexpr double kWeightTol = 1e-12;   // criterion 2: linear/log forms (onezero exact)
constexpr double kReturnTol = 1e-12;   // criterion 3: relative, floored at magnitude 1
constexpr double kGradBudgetSec = 30.0;
constexpr double kWeightBudgetSec = 1.0;
constexpr double kEquivBudgetSec = 120.0;

// The noise source is a mid-training snapshot: far enough in to hold
// confidently wrong action preferences (which genuinely corrupt an imitation
// learner), unlike a near-initialization snapshot whose near-uniform
// distributions are harmless label smoothing.
constexpr double kImmatureFraction = 0.5;

struct Scale {
  std::string name;
  int grid_expert_iters, cart_expert_iters;  // full-size expert preparation
  int iters;                                 // comparison/ablation cells
  int grid_steps, cart_steps;                // rollout steps per iteration
  int sweep_iters, sweep_steps;              // noise-sweep cells
  int adapt_iters, adapt_steps;              // weight-adaptivity invariant
};

Scale pick_scale() {
  const char* env = std::getenv("DWRL_ACCEPT_SCALE");
  if (env != nullptr && std::strcmp(env, "full") == 0) {
    return {"full", 500, 500, 500, 2048, 2048, 500, 2048, 500, 2048};
  }
  return {"desk", 320, 300, 300, 1024, 1024, 40, 512, 210, 512};
}

std::string g_out;  // artifact root, stamped with the scale name
Scale g_scale;

std::string path(const std::string& rel) { return (fs::path(g_out) / rel).string(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

double mean_return(const std::string& csv) {
  auto metrics = read_metrics_csv(csv);
  double sum = 0.0;
  for (const auto& m : metrics) sum += m.mean_episode_return;
  return sum / static_cast<double>(metrics.size());
}

double final_return(const std::string& csv) {
  return read_metrics_csv(csv).back().mean_episode_return;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---- shared fixtures -------------------------------------------------------

TrainConfig expert_base(const std::string& env_id, int iters) {
  TrainConfig base;
  base.env_id = env_id;
  base.iterations = iters;
  base.seed = 1;
  return base;
}

struct EnvFixture {
  ExpertArtifacts expert;
  std::string demos;  // 10 trajectories, 5 corrupted by the immature agent
};

EnvFixture prepare_env(const std::string& env_id, int expert_iters) {
  EnvFixture fx;
  fx.expert = cmd_train_expert(expert_base(env_id, expert_iters), path(env_id + "/expert"),
                               kImmatureFraction);
  fx.demos = path(env_id + "/demos-r0.5.jsonl");
  cmd_gen_demos(fx.expert.expert_path, fx.expert.immature_path, env_id, 10, 0.5, 77, 0.99,
                fx.demos);
  return fx;
}

ExperimentManifest grid_manifest(const EnvFixture& fx, const std::string& sub,
                                 std::vector<std::uint64_t> seeds) {
  ExperimentManifest m;
  m.seeds = std::move(seeds);
  m.base.env_id = "gridworld8";
  m.base.iterations = g_scale.iters;
  m.base.steps_per_iteration = g_scale.grid_steps;
  m.demo_path = fx.demos;
  m.out_dir = path("gridworld8/" + sub);
  return m;
}

// ---- criterion 1: finite-difference gradient suite ------------------------

std::vector<double> random_state(RngStream& rng, int dim) {
  std::vector<double> s(static_cast<std::size_t>(dim));
  for (auto& v : s) v = rng.uniform(-1.0, 1.0);
  return s;
}

RolloutBatch make_batch(const MlpParams& policy, RngStream& rng, int steps, int obs_dim) {
  RolloutBatch batch;
  for (int t = 0; t < steps; ++t) {
    Transition tr;
    tr.state = random_state(rng, obs_dim);
    tr.next_state = random_state(rng, obs_dim);
    auto dist = policy_distribution(policy, tr.state);
    tr.action = sample_action(dist, rng);
    tr.log_prob = action_log_prob(dist, tr.action);
    tr.old_dist = dist;
    tr.reward = rng.uniform(-1.0, 1.0);
    tr.done = ((t + 1) % 7 == 0);
    batch.transitions.push_back(std::move(tr));
  }
  return batch;
}

DemoSet fixture_demos(const MlpParams& policy, RngStream& rng, int trajs, int steps, int obs_dim,
                      bool discrete, int act_dim) {
  DemoSet demos;
  demos.env_id = "fixture";
  demos.gamma = 0.9;
  for (int i = 0; i < trajs; ++i) {
    Trajectory traj;
    traj.id = "t" + std::to_string(i);
    for (int j = 0; j < steps; ++j) {
      DemoInstance inst;
      inst.state = random_state(rng, obs_dim);
      if (discrete) {
        auto dist = policy_distribution(policy, inst.state);
        inst.expert_action = sample_action(dist, rng);
        inst.action_probs = dist.probs;
      } else {
        std::vector<double> a(static_cast<std::size_t>(act_dim));
        for (auto& v : a) v = rng.uniform(-1.0, 1.0);
        inst.expert_action = Action::continuous(std::move(a));
      }
      inst.reward = rng.uniform(-1.0, 1.0);
      traj.instances.push_back(std::move(inst));
    }
    demos.trajectories.push_back(std::move(traj));
  }
  return demos;
}

// Largest relative (abs-floored) mismatch between analytic gradients and
// central differences over every parameter entry.
double fd_worst(MlpParams& params, const Gradients& analytic,
                const std::function<double(const MlpParams&)>& loss) {
  const double h = 1e-5;
  double worst = 0.0;
  auto names = params.named_tensors();
  auto grads = analytic.named_tensors();
  for (std::size_t t = 0; t < names.size(); ++t) {
    Tensor* p = names[t].second;
    const Tensor* g = grads[t].second;
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = (*p)[i];
      (*p)[i] = saved + h;
      const double up = loss(params);
      (*p)[i] = saved - h;
      const double down = loss(params);
      (*p)[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic_v = (*g)[i];
      const double scale = std::max(std::fabs(numeric), std::fabs(analytic_v));
      if (scale > 1e-6) {
        worst = std::max(worst, std::fabs(analytic_v - numeric) / scale);
      } else if (std::fabs(analytic_v - numeric) > kGradAbsTol) {
        worst = std::max(worst, 1.0);  // near-zero entry with a real mismatch
      }
    }
  }
  return worst;
}

Outcome criterion_gradients() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  auto track = [&](double w) { worst = std::max(worst, w); };

  {  // discrete head: demo CE, PPO, TRPO-KL, joint, value regression
    RngStream rng(101);
    auto policy = make_mlp(4, {6}, 3, Head::kSoftmax, rng);
    auto vnet = make_mlp(4, {8}, 1, Head::kLinear, rng);
    auto batch = make_batch(policy, rng, 16, 4);
    compute_advantages(batch, vnet, 0.99, 0.95, false);

    auto ppo = ppo_loss(batch, policy, 0.2, 1);
    track(fd_worst(policy, ppo.grads,
                   [&](const MlpParams& q) { return ppo_loss(batch, q, 0.2, 1).loss; }));

    auto trpo = trpo_penalty_loss(batch, policy, 0.5, 1);
    track(fd_worst(policy, trpo.grads, [&](const MlpParams& q) {
      return trpo_penalty_loss(batch, q, 0.5, 1).loss;
    }));

    auto demos = fixture_demos(policy, rng, 2, 6, 4, true, 3);
    auto weights = weigh_demoset(demos, vnet, WeightForm::linear(10.0), 1, 1);
    auto dl = demo_loss(demos, weights, policy, 1);
    track(fd_worst(policy, dl.grads,
                   [&](const MlpParams& q) { return demo_loss(demos, weights, q, 1).loss; }));

    auto joint = joint_loss(dl, ppo, 0.7);
    track(fd_worst(policy, joint.grads, [&](const MlpParams& q) {
      return demo_loss(demos, weights, q, 1).loss + 0.7 * ppo_loss(batch, q, 0.2, 1).loss;
    }));

    auto vl = value_loss(batch, vnet, 1);
    track(fd_worst(vnet, vl.grads,
                   [&](const MlpParams& q) { return value_loss(batch, q, 1).loss; }));
  }
  {  // gaussian head: PPO, TRPO-KL, demo log-likelihood
    RngStream rng(103);
    auto policy = make_mlp(3, {6}, 2, Head::kGaussian, rng);
    auto vnet = make_mlp(3, {8}, 1, Head::kLinear, rng);
    auto batch = make_batch(policy, rng, 12, 3);
    compute_advantages(batch, vnet, 0.99, 0.95, false);

    auto ppo = ppo_loss(batch, policy, 0.2, 1);
    track(fd_worst(policy, ppo.grads,
                   [&](const MlpParams& q) { return ppo_loss(batch, q, 0.2, 1).loss; }));
    auto trpo = trpo_penalty_loss(batch, policy, 0.3, 1);
    track(fd_worst(policy, trpo.grads, [&](const MlpParams& q) {
      return trpo_penalty_loss(batch, q, 0.3, 1).loss;
    }));

    auto demos = fixture_demos(policy, rng, 2, 5, 3, false, 2);
    auto weights = weigh_demoset(demos, vnet, WeightForm::one_zero(), 1, 1);
    auto dl = demo_loss(demos, weights, policy, 1);
    track(fd_worst(policy, dl.grads,
                   [&](const MlpParams& q) { return demo_loss(demos, weights, q, 1).loss; }));
  }

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome out;
  out.pass = worst < kGradRelTol && secs < kGradBudgetSec;
  out.detail = "worst rel err " + fmt(worst) + ", " + fmt(secs) + " s";
  return out;
}

// ---- criterion 2: weight-formula oracle -----------------------------------

Outcome criterion_weight_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  RngStream rng(202);
  double worst = 0.0;
  bool onezero_exact = true;
  for (int i = 0; i < 1000; ++i) {
    const double q = rng.uniform(-50.0, 50.0);
    const double v = rng.uniform(-50.0, 50.0);
    const double gap = q - v;

    const double oracle_onezero = gap >= 0.0 ? 1.0 : 0.0;
    if (compute_weight(q, v, WeightForm::one_zero()) != oracle_onezero) onezero_exact = false;

    for (double delta : {10.0, 20.0}) {
      const double oracle_linear = gap / delta > 0.0 ? gap / delta : 0.0;
      worst = std::max(worst,
                       std::fabs(compute_weight(q, v, WeightForm::linear(delta)) - oracle_linear));
    }
    const double oracle_log = std::log(gap > 1.0 ? gap : 1.0);
    worst = std::max(worst, std::fabs(compute_weight(q, v, WeightForm::log()) - oracle_log));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome out;
  out.pass = onezero_exact && worst <= kWeightTol && secs < kWeightBudgetSec;
  out.detail = std::string("onezero ") + (onezero_exact ? "exact" : "INEXACT") +
               ", linear/log worst " + fmt(worst) + ", " + fmt(secs) + " s";
  return out;
}

// ---- criterion 3: return-to-go oracle -------------------------------------

Outcome criterion_return_oracle() {
  RngStream rng(303);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.raw() % 40);
    const double gamma = rng.uniform(0.9, 0.999);
    Trajectory traj;
    traj.id = "t";
    for (int j = 0; j < n; ++j) {
      DemoInstance inst;
      inst.state = {0.0};
      inst.expert_action = Action::discrete(0);
      inst.reward = rng.uniform(-5.0, 5.0);
      traj.instances.push_back(std::move(inst));
    }
    // reverse-scan oracle
    std::vector<double> oracle(static_cast<std::size_t>(n));
    oracle[static_cast<std::size_t>(n - 1)] = traj.instances.back().reward;
    for (int j = n - 2; j >= 0; --j) {
      oracle[static_cast<std::size_t>(j)] =
          traj.instances[static_cast<std::size_t>(j)].reward +
          gamma * oracle[static_cast<std::size_t>(j + 1)];
    }
    for (int j = 0; j < n; ++j) {
      const double got = mc_return(traj, static_cast<std::size_t>(j), gamma);
      const double want = oracle[static_cast<std::size_t>(j)];
      worst = std::max(worst, std::fabs(got - want) / std::max(1.0, std::fabs(want)));
      if (j + 1 < n) {  // Bellman recursion at every interior index
        const double bellman = traj.instances[static_cast<std::size_t>(j)].reward +
                               gamma * mc_return(traj, static_cast<std::size_t>(j + 1), gamma);
        worst = std::max(worst, std::fabs(got - bellman) / std::max(1.0, std::fabs(bellman)));
      }
    }
  }
  Outcome out;
  out.pass = worst <= kReturnTol;
  out.detail = "worst rel err " + fmt(worst);
  return out;
}

// ---- criteria 4 and 5: method comparison ----------------------------------

const std::vector<std::uint64_t> kFiveSeeds = {1, 2, 3, 4, 5};

struct CompareStats {
  // per-seed mean-over-iterations by method label, and per-seed final return
  std::map<std::string, std::vector<double>> means;
  std::map<std::string, std::vector<double>> finals;
  double expert_mean = 0.0;
};

CompareStats run_compare(const EnvFixture& fx, const std::string& env_id, int steps) {
  ExperimentManifest m;
  m.seeds = kFiveSeeds;
  m.base.env_id = env_id;
  m.base.iterations = g_scale.iters;
  m.base.steps_per_iteration = steps;
  m.demo_path = fx.demos;
  m.out_dir = path(env_id + "/compare");
  CompareOutput co = cmd_compare(m);

  CompareStats st;
  st.expert_mean = co.expert_mean;
  for (Mode mode : m.methods) {
    const std::string label = mode_name(mode);
    for (std::uint64_t s : m.seeds) {
      const std::string csv = m.out_dir + "/runs/" + label + "-s" + std::to_string(s) + ".csv";
      st.means[label].push_back(mean_return(csv));
      st.finals[label].push_back(final_return(csv));
    }
  }
  return st;
}

int seeds_where_geq(const std::vector<double>& a, const std::vector<double>& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= b[i]) ++n;
  }
  return n;
}

std::string beats_detail(const CompareStats& st, std::string& why, bool& pass) {
  std::string detail;
  for (const char* baseline : {"rl", "il", "lfnd-now"}) {
    int wins = seeds_where_geq(st.means.at("lfnd"), st.means.at(baseline));
    detail += std::string(baseline) + " " + std::to_string(wins) + "/5 ";
    if (wins < 4) {
      pass = false;
      why += std::string("lfnd < ") + baseline + " too often; ";
    }
  }
  return detail;
}

CompareStats g_grid_stats, g_cart_stats;  // filled by criterion 4, reused by 5

Outcome criterion_compare(const EnvFixture& grid_fx, const EnvFixture& cart_fx) {
  g_grid_stats = run_compare(grid_fx, "gridworld8", g_scale.grid_steps);
  g_cart_stats = run_compare(cart_fx, "cartpole", g_scale.cart_steps);
  Outcome out;
  out.pass = true;
  std::string why;
  out.detail = "grid: " + beats_detail(g_grid_stats, why, out.pass);
  out.detail += "| cartpole: " + beats_detail(g_cart_stats, why, out.pass);
  if (!why.empty()) out.detail += "| " + why;
  return out;
}

Outcome criterion_il_below_expert() {
  int below = 0;
  const auto& finals = g_grid_stats.finals.at("il");
  for (double f : finals) {
    if (f < g_grid_stats.expert_mean) ++below;
  }
  Outcome out;
  out.pass = below * 2 > static_cast<int>(finals.size());
  out.detail = "il final < expert mean (" + fmt(g_grid_stats.expert_mean) + ") in " +
               std::to_string(below) + "/" + std::to_string(finals.size()) + " seeds";
  return out;
}

// ---- criterion 6: noise sweep ---------------------------------------------

Outcome criterion_noise_sweep(const EnvFixture& grid_fx) {
  ExperimentManifest m;
  m.kind = ExperimentManifest::Kind::kNoiseSweep;
  m.seeds = {1, 2, 3};
  m.base.env_id = "gridworld8";
  m.base.iterations = g_scale.sweep_iters;
  m.base.steps_per_iteration = g_scale.sweep_steps;
  m.methods = {Mode::kIlOnly, Mode::kLfnd};
  m.expert_path = grid_fx.expert.expert_path;
  m.immature_path = grid_fx.expert.immature_path;
  m.demo_count = 10;
  m.out_dir = path("gridworld8/sweep");
  SweepOutput sw = cmd_noise_sweep(m);

  const std::vector<double>& over_il = sw.improvement.at("il");
  const double at_00 = over_il[0], at_08 = over_il[8];
  Outcome out;
  out.pass = at_08 > at_00;
  out.detail = "improvement over il: " + fmt(at_00) + " at ratio 0.0, " + fmt(at_08) +
               " at ratio 0.8";
  return out;
}

// ---- criterion 7: weight deciles ------------------------------------------

Outcome criterion_weight_groups(const EnvFixture& grid_fx) {
  ExperimentManifest m = grid_manifest(grid_fx, "groups", kFiveSeeds);
  m.kind = ExperimentManifest::Kind::kWeightGroups;
  WeightGroupsOutput wg = cmd_weight_groups(m);

  int good_seeds = 0;
  for (std::uint64_t s : m.seeds) {
    const DecileRow* bottom = nullptr;
    const DecileRow* top = nullptr;
    for (const DecileRow& r : wg.rows) {
      if (r.seed != s) continue;
      if (r.group == 1) bottom = &r;
      if (r.group == 10) top = &r;
    }
    if (top->il_mean > bottom->il_mean && bottom->noisy_fraction > top->noisy_fraction) {
      ++good_seeds;
    }
  }
  Outcome out;
  out.pass = good_seeds * 2 > static_cast<int>(m.seeds.size());
  out.detail = "top decile better and less noisy in " + std::to_string(good_seeds) + "/" +
               std::to_string(m.seeds.size()) + " seeds";
  return out;
}

// ---- criterion 8: weighting-strategy ablation ------------------------------

Outcome criterion_weight_forms(const EnvFixture& grid_fx) {
  ExperimentManifest m = grid_manifest(grid_fx, "forms", kFiveSeeds);
  m.kind = ExperimentManifest::Kind::kWeightForms;
  cmd_weight_forms(m);

  std::map<std::string, std::vector<double>> means;
  for (const char* label : {"onezero", "linear10", "linear20", "log", "rl"}) {
    for (std::uint64_t s : m.seeds) {
      means[label].push_back(
          mean_return(m.out_dir + "/runs/" + label + "-s" + std::to_string(s) + ".csv"));
    }
  }
  Outcome out;
  out.pass = true;
  for (const char* form : {"log", "linear10", "linear20"}) {
    int wins = seeds_where_geq(means.at(form), means.at("onezero"));
    out.detail += std::string(form) + ">=onezero " + std::to_string(wins) + "/5 ";
    if (wins < 3) out.pass = false;
  }
  for (const char* form : {"onezero", "log", "linear10", "linear20"}) {
    int wins = seeds_where_geq(means.at(form), means.at("rl"));
    out.detail += std::string(form) + ">=rl " + std::to_string(wins) + "/5 ";
    if (wins < 4) out.pass = false;
  }
  return out;
}

// ---- criterion 9: mode equivalences ---------------------------------------

Outcome criterion_mode_equivalence(const EnvFixture& grid_fx) {
  auto t0 = std::chrono::steady_clock::now();
  TrainConfig base;
  base.env_id = "gridworld8";
  base.mode = Mode::kLfnd;
  base.iterations = 4;
  base.steps_per_iteration = 64;
  base.seed = 5;
  base.eval_episodes = 2;
  base.hidden = {16};
  base.demo_path = grid_fx.demos;

  bool ok = true;
  {  // constant-1 weights reproduce the no-weighting mode bit for bit
    TrainConfig a = base;
    a.weight_form = WeightForm::constant_one();
    TrainConfig b = base;
    b.mode = Mode::kLfndNoW;
    ok = ok && same_numbers(train(a).metrics, train(b).metrics);
  }
  {  // lambda = 0 reproduces weighted imitation bit for bit
    TrainConfig a = base;
    a.loss.lambda_tradeoff = 0.0;
    TrainConfig b = base;
    b.mode = Mode::kIlOnly;
    b.weighted_il = true;
    ok = ok && same_numbers(train(a).metrics, train(b).metrics);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome out;
  out.pass = ok && secs < kEquivBudgetSec;
  out.detail = std::string(ok ? "traces bit-identical" : "TRACE MISMATCH") + ", " + fmt(secs) +
               " s";
  return out;
}

// ---- criterion 10: determinism and resume ---------------------------------

bool params_equal(const MlpParams& a, const MlpParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].w.data != b.layers[l].w.data) return false;
    if (a.layers[l].b.data != b.layers[l].b.data) return false;
  }
  return true;
}

Outcome criterion_determinism(const EnvFixture& grid_fx) {
  const std::string dir = path("determinism");
  fs::create_directories(dir);
  TrainConfig base;
  base.env_id = "gridworld8";
  base.mode = Mode::kLfnd;
  base.iterations = 100;
  base.steps_per_iteration = g_scale.adapt_steps;
  base.seed = 9;
  base.demo_path = grid_fx.demos;

  TrainConfig full = base;
  TrainResult r1 = train(full);
  TrainResult r2 = train(full);
  bool identical = same_numbers(r1.metrics, r2.metrics) && params_equal(r1.policy, r2.policy);

  TrainConfig half = base;
  half.iterations = 50;
  half.checkpoint_path = dir + "/half.dwrl";
  train(half);
  TrainConfig rest = base;
  rest.resume_path = half.checkpoint_path;
  TrainResult resumed = train(rest);

  bool resume_ok = resumed.metrics.size() == 50 && params_equal(resumed.policy, r1.policy) &&
                   resumed.env_steps == r1.env_steps;
  for (std::size_t i = 0; i < resumed.metrics.size() && resume_ok; ++i) {
    resume_ok = same_numbers(resumed.metrics[i], r1.metrics[i + 50]);
  }
  Outcome out;
  out.pass = identical && resume_ok;
  out.detail = std::string("rerun ") + (identical ? "bit-identical" : "DIVERGED") + ", resume " +
               (resume_ok ? "bit-identical" : "DIVERGED");
  return out;
}

// ---- trainer invariant: weights adapt over training ------------------------

Outcome invariant_weight_adaptivity(const EnvFixture& grid_fx) {
  int adapted = 0;
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  for (std::uint64_t s : seeds) {
    TrainConfig c;
    c.env_id = "gridworld8";
    c.mode = Mode::kLfnd;
    c.iterations = g_scale.adapt_iters;
    c.steps_per_iteration = g_scale.adapt_steps;
    c.seed = s;
    c.demo_path = grid_fx.demos;
    c.metrics_path = path("gridworld8/adapt/s" + std::to_string(s) + ".csv");
    fs::create_directories(path("gridworld8/adapt"));
    std::vector<IterationMetrics> metrics;
    if (fs::exists(c.metrics_path) &&
        read_metrics_csv(c.metrics_path).size() == static_cast<std::size_t>(c.iterations)) {
      metrics = read_metrics_csv(c.metrics_path);  // cached from an earlier invocation
    } else {
      metrics = train(c).metrics;
    }
    if (metrics.back().fraction_zero_weight > metrics.front().fraction_zero_weight) ++adapted;
  }
  Outcome out;
  out.pass = adapted * 2 > static_cast<int>(seeds.size());
  out.detail = "fraction_zero_weight grew in " + std::to_string(adapted) + "/" +
               std::to_string(seeds.size()) + " seeds";
  return out;
}

}  // namespace

int main() {
  g_scale = pick_scale();
  g_out = (fs::current_path() / "acceptance-out").string();
  fs::create_directories(g_out);

  // Cached artifacts are only valid for the scale that produced them.
  const std::string stamp_file = path("scale.txt");
  std::string stamp;
  {
    std::ifstream in(stamp_file);
    std::getline(in, stamp);
  }
  if (stamp != g_scale.name) {
    fs::remove_all(g_out);
    fs::create_directories(g_out);
    std::ofstream out(stamp_file);
    out << g_scale.name << '\n';
  }
  std::printf("acceptance suite, %s scale, artifacts in %s\n", g_scale.name.c_str(),
              g_out.c_str());

  // Expert/demo fixtures are prepared on first use so the oracle criteria
  // report before any training starts; preparation is cached on disk, so a
  // retry after a failure is cheap.
  struct Lazy {
    std::string env_id;
    int iters;
    bool ready = false;
    EnvFixture fx;
    EnvFixture& get() {
      if (!ready) {
        fx = prepare_env(env_id, iters);
        ready = true;
      }
      return fx;
    }
  };
  Lazy grid_fx{"gridworld8", g_scale.grid_expert_iters, false, {}};
  Lazy cart_fx{"cartpole", g_scale.cart_expert_iters, false, {}};

  struct Item {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, "gradients match finite differences", criterion_gradients},
      {2, "weight formulas match straight-line oracle", criterion_weight_oracle},
      {3, "return-to-go matches reverse scan and Bellman", criterion_return_oracle},
      {4, "joint training beats each baseline on both tasks",
       [&] { return criterion_compare(grid_fx.get(), cart_fx.get()); }},
      {5, "imitation alone stays below the demo average",
       [&] { return criterion_il_below_expert(); }},
      {6, "advantage over imitation grows with demo noise",
       [&] { return criterion_noise_sweep(grid_fx.get()); }},
      {7, "high-weight demos imitate better and are cleaner",
       [&] { return criterion_weight_groups(grid_fx.get()); }},
      {8, "graded weight forms beat the indicator form",
       [&] { return criterion_weight_forms(grid_fx.get()); }},
      {9, "mode equivalences are bit-exact",
       [&] { return criterion_mode_equivalence(grid_fx.get()); }},
      {10, "reruns and checkpoint resume are bit-exact",
       [&] { return criterion_determinism(grid_fx.get()); }},
      {11, "zero-weight fraction rises over training",
       [&] { return invariant_weight_adaptivity(grid_fx.get()); }},
  };

  // Development aid: DWRL_ACCEPT_ONLY="9,10" runs a subset. The shipped gate
  // is an unfiltered run; filtered runs still exit nonzero on any failure.
  std::vector<int> only;
  if (const char* filter = std::getenv("DWRL_ACCEPT_ONLY")) {
    std::stringstream ss(filter);
    std::string tok;
    while (std::getline(ss, tok, ',')) only.push_back(std::atoi(tok.c_str()));
  }

  int passed = 0;
  int ran = 0;
  for (const Item& item : items) {
    if (!only.empty() && std::find(only.begin(), only.end(), item.id) == only.end()) continue;
    ++ran;
    Outcome res;
    auto t0 = std::chrono::steady_clock::now();
    try {
      res = item.run();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = item.id <= 10 ? "criterion" : "invariant";
    std::printf("%s %2d (%s): %s  [%s]  (%.1f s)\n", tag, item.id, item.name.c_str(),
                res.pass ? "PASS" : "FAIL", res.detail.c_str(), secs);
    std::fflush(stdout);
    if (res.pass) ++passed;
  }

  std::printf("acceptance: %d/%d checks passed\n", passed, ran);
  return passed == ran && ran > 0 ? 0 : 1;
}
