#include "dwrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "dwrl/chart.hpp"
#include "dwrl/checkpoint.hpp"
#include "dwrl/demos.hpp"
#include "dwrl/error.hpp"
#include "dwrl/rng.hpp"
#include "dwrl/weighting.hpp"

namespace dwrl {
namespace {

namespace fs = std::filesystem;

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_ratio(double r) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f", r);
  return buf;
}

std::optional<std::string> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string content_hash(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

// ---------------------------------------------------------------------------
// Cell engine: each cell is one training run writing its own metrics CSV (and
// optionally a weight dump). A "<metrics>.ok" sidecar records the CSV's
// content hash once the run finishes; re-invocations skip cells whose sidecar
// still matches and re-run cells whose artifacts are missing or stale.

struct Cell {
  std::string label;
  TrainConfig config;                       // metrics_path always set
  std::vector<std::string> extra_outputs;   // must also exist for a skip
};

std::string ok_path_for(const Cell& c) { return c.config.metrics_path + ".ok"; }

bool cell_up_to_date(const Cell& c) {
  auto ok = read_file_bytes(ok_path_for(c));
  if (!ok) return false;
  auto csv = read_file_bytes(c.config.metrics_path);
  if (!csv) return false;
  if (content_hash(*csv) != *ok) return false;
  for (const std::string& extra : c.extra_outputs) {
    if (!fs::exists(extra)) {
      throw StateError("cell '" + c.label + "' has a completed metrics file but '" + extra +
                       "' is missing; delete '" + ok_path_for(c) +
                       "' and re-run so the cell executes again with weight dumping enabled");
    }
  }
  return true;
}

void mark_cell_done(const Cell& c) {
  auto csv = read_file_bytes(c.config.metrics_path);
  if (!csv) {
    throw StateError("cell '" + c.label + "' finished without writing " + c.config.metrics_path);
  }
  std::ofstream out(ok_path_for(c), std::ios::binary | std::ios::trunc);
  out << content_hash(*csv);
}

int experiment_threads() {
  const char* env = std::getenv("DWRL_THREADS");
  if (env == nullptr || *env == '\0') {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  std::string text(env);
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || value < 1) {
    throw ConfigError("DWRL_THREADS must be a positive integer, got '" + text + "'");
  }
  return value;
}

void run_cell(const Cell& c) {
  try {
    train(c.config);
  } catch (const ConfigError& e) {
    throw ConfigError("cell '" + c.label + "': " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("cell '" + c.label + "': " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("cell '" + c.label + "': " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("cell '" + c.label + "': " + e.what());
  }
  mark_cell_done(c);
}

// Runs pending cells in parallel. On failure, cells already in flight finish
// and their artifacts are kept; unstarted cells are abandoned and the first
// error is rethrown.
void run_cells(const std::vector<Cell>& cells) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cell_up_to_date(cells[i])) continue;
    fs::remove(ok_path_for(cells[i]));  // drop any stale sidecar
    pending.push_back(i);
  }
  if (pending.empty()) return;

  int threads = std::min<int>(experiment_threads(), static_cast<int>(pending.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&]() {
    while (true) {
      std::size_t k = next.fetch_add(1);
      if (k >= pending.size() || failed.load()) break;
      try {
        run_cell(cells[pending[k]]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Shared summarization helpers.

std::string runs_dir(const ExperimentManifest& m) { return path_join(m.out_dir, "runs"); }
std::string dumps_dir(const ExperimentManifest& m) { return path_join(m.out_dir, "dumps"); }

std::string run_csv(const ExperimentManifest& m, const std::string& name) {
  return path_join(runs_dir(m), name + ".csv");
}

struct SeedStats {
  double mean = 0.0;
  double max = 0.0;
};

SeedStats stats_for_run(const std::string& csv_path) {
  std::vector<IterationMetrics> metrics = read_metrics_csv(csv_path);
  if (metrics.empty()) throw ParseError(csv_path + ": no metric rows");
  SeedStats s;
  s.max = metrics.front().mean_episode_return;
  for (const IterationMetrics& it : metrics) {
    s.mean += it.mean_episode_return;
    s.max = std::max(s.max, it.mean_episode_return);
  }
  s.mean /= static_cast<double>(metrics.size());
  return s;
}

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  stddev = std::sqrt(var / static_cast<double>(xs.size()));
}

MethodSummary summarize_runs(const std::string& label, const std::vector<std::string>& csv_paths) {
  std::vector<double> means, maxes;
  for (const std::string& p : csv_paths) {
    SeedStats s = stats_for_run(p);
    means.push_back(s.mean);
    maxes.push_back(s.max);
  }
  MethodSummary out;
  out.label = label;
  mean_std(means, out.mean_reward, out.mean_reward_std);
  mean_std(maxes, out.max_reward, out.max_reward_std);
  return out;
}

void write_summary_csv(const std::string& path, const std::vector<MethodSummary>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << "label,mean_reward,mean_reward_std,max_reward,max_reward_std\n";
  for (const MethodSummary& r : rows) {
    out << r.label << ',' << fmt_double(r.mean_reward) << ',' << fmt_double(r.mean_reward_std)
        << ',' << fmt_double(r.max_reward) << ',' << fmt_double(r.max_reward_std) << '\n';
  }
}

// Per-iteration mean of the evaluation return across seeds, read back from
// the per-cell CSVs so figures depend only on emitted artifacts.
Series mean_series(const std::string& label, const std::vector<std::string>& csv_paths) {
  Series out;
  out.label = label;
  bool first = true;
  for (const std::string& p : csv_paths) {
    std::vector<IterationMetrics> metrics = read_metrics_csv(p);
    if (first) {
      for (const IterationMetrics& it : metrics) {
        out.x.push_back(static_cast<double>(it.iteration));
        out.y.push_back(it.mean_episode_return);
      }
      first = false;
      continue;
    }
    if (metrics.size() != out.y.size()) {
      throw DimensionError(p + ": has " + std::to_string(metrics.size()) +
                           " rows but sibling runs have " + std::to_string(out.y.size()));
    }
    for (std::size_t i = 0; i < metrics.size(); ++i) out.y[i] += metrics[i].mean_episode_return;
  }
  double n = static_cast<double>(csv_paths.size());
  for (double& y : out.y) y /= n;
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate_common(const ExperimentManifest& m) {
  require(!m.seeds.empty(), "experiment needs at least one seed");
  require(!m.out_dir.empty(), "experiment needs an output directory");
  require(!m.base.env_id.empty(), "experiment needs an environment id");
}

bool uses_demos(Mode mode) { return mode != Mode::kRlOnly; }

TrainConfig cell_config(const ExperimentManifest& m, Mode mode, std::uint64_t seed,
                        const std::string& run_name, const std::string& demo_path) {
  TrainConfig c = m.base;
  c.mode = mode;
  c.seed = seed;
  c.demo_path = uses_demos(mode) ? demo_path : "";
  c.metrics_path = run_csv(m, run_name);
  c.weight_dump_path.clear();
  c.checkpoint_path.clear();
  c.resume_path.clear();
  return c;
}

std::string seed_tag(std::uint64_t seed) { return "s" + std::to_string(seed); }

// ---------------------------------------------------------------------------
// Method comparison.

std::vector<std::string> method_csvs(const ExperimentManifest& m, const std::string& label) {
  std::vector<std::string> paths;
  for (std::uint64_t s : m.seeds) paths.push_back(run_csv(m, label + "-" + seed_tag(s)));
  return paths;
}

CompareOutput summarize_compare(const ExperimentManifest& m) {
  CompareOutput out;
  std::vector<Series> series;
  for (Mode mode : m.methods) {
    std::string label = mode_name(mode);
    std::vector<std::string> paths = method_csvs(m, label);
    out.summary.push_back(summarize_runs(label, paths));
    series.push_back(mean_series(label, paths));
  }
  out.expert_mean = demoset_stats(load_demos(m.demo_path)).mean_return;

  out.summary_csv = path_join(m.out_dir, "summary.csv");
  write_summary_csv(out.summary_csv, out.summary);

  ChartOptions options;
  options.title = "method comparison on " + m.base.env_id;
  options.hlines.push_back({out.expert_mean, "expert"});
  out.curves_svg = path_join(m.out_dir, "curves.svg");
  render_curves(series, options, out.curves_svg);
  return out;
}

}  // namespace

ExpertArtifacts cmd_train_expert(const TrainConfig& base, const std::string& out_dir,
                                 double immature_fraction) {
  if (!(immature_fraction > 0.0) || !(immature_fraction < 1.0)) {
    throw ConfigError("immature_fraction must lie strictly between 0 and 1, got " +
                      fmt_double(immature_fraction));
  }
  if (base.iterations < 2) {
    throw ConfigError("expert training needs at least 2 iterations to snapshot an "
                      "intermediate policy");
  }
  ensure_dir(out_dir);
  ExpertArtifacts paths;
  paths.expert_path = path_join(out_dir, "expert.dwrl");
  paths.immature_path = path_join(out_dir, "immature.dwrl");

  int immature_iters = static_cast<int>(std::lround(immature_fraction * base.iterations));
  immature_iters = std::clamp(immature_iters, 1, base.iterations - 1);

  // Skip retraining when both checkpoints already exist at the right
  // iteration counts; any load or metadata problem falls through to a rerun.
  try {
    Container expert = Container::load(paths.expert_path);
    Container immature = Container::load(paths.immature_path);
    if (expert.meta.at("iteration") == std::to_string(base.iterations) &&
        immature.meta.at("iteration") == std::to_string(immature_iters) &&
        expert.meta.at("env_id") == base.env_id && immature.meta.at("env_id") == base.env_id) {
      return paths;
    }
  } catch (const std::exception&) {
  }

  TrainConfig common = base;
  common.mode = Mode::kRlOnly;
  common.demo_path.clear();
  common.weighted_il = false;
  common.weight_dump_path.clear();
  common.metrics_path = path_join(out_dir, "expert.csv");
  common.resume_path.clear();

  TrainConfig phase1 = common;
  phase1.iterations = immature_iters;
  phase1.checkpoint_path = paths.immature_path;
  train(phase1);

  TrainConfig phase2 = common;
  phase2.iterations = base.iterations;
  phase2.checkpoint_path = paths.expert_path;
  phase2.resume_path = paths.immature_path;
  train(phase2);
  return paths;
}

MlpParams load_policy_checkpoint(const std::string& path) {
  return Container::load(path).get_params("policy");
}

void cmd_gen_demos(const std::string& expert_path, const std::string& immature_path,
                   const std::string& env_id, int count, double noise_ratio, std::uint64_t seed,
                   double gamma, const std::string& out_path) {
  if (count < 1) throw ConfigError("demo count must be >= 1, got " + std::to_string(count));
  if (!(noise_ratio >= 0.0) || !(noise_ratio <= 1.0)) {
    throw ConfigError("noise ratio must lie in [0, 1], got " + fmt_double(noise_ratio));
  }
  MlpParams expert = load_policy_checkpoint(expert_path);
  std::unique_ptr<Environment> env = make_env(env_id);
  DemoSet demos = generate_demos(expert, *env, count, seed, gamma);

  int victims = static_cast<int>(std::lround(noise_ratio * count));
  if (victims > 0) {
    if (immature_path.empty()) {
      throw ConfigError("noise ratio " + fmt_double(noise_ratio) +
                        " corrupts trajectories and needs an immature checkpoint");
    }
    ImmatureAgent agent{load_policy_checkpoint(immature_path)};
    demos = corrupt(demos, noise_ratio, agent, splitmix64(seed ^ fnv1a64("corrupt")));
  }
  fs::path parent = fs::path(out_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  save_demos(demos, out_path);
}

CompareOutput cmd_compare(const ExperimentManifest& m) {
  validate_common(m);
  require(!m.methods.empty(), "method comparison needs at least one method");
  require(!m.demo_path.empty(), "method comparison needs a demo file");
  ensure_dir(runs_dir(m));

  std::vector<Cell> cells;
  for (Mode mode : m.methods) {
    for (std::uint64_t seed : m.seeds) {
      std::string name = std::string(mode_name(mode)) + "-" + seed_tag(seed);
      cells.push_back({name, cell_config(m, mode, seed, name, m.demo_path), {}});
    }
  }
  run_cells(cells);
  return summarize_compare(m);
}

// ---------------------------------------------------------------------------
// Noise sweep.

namespace {

std::vector<double> sweep_ratios() {
  std::vector<double> r;
  for (int i = 0; i <= 10; ++i) r.push_back(static_cast<double>(i) / 10.0);
  return r;
}

std::string sweep_demo_path(const ExperimentManifest& m, double ratio) {
  return path_join(path_join(m.out_dir, "demos"), "r" + fmt_ratio(ratio) + ".jsonl");
}

std::string sweep_run_name(Mode mode, double ratio, std::uint64_t seed) {
  if (mode == Mode::kRlOnly) return std::string(mode_name(mode)) + "-" + seed_tag(seed);
  return "r" + fmt_ratio(ratio) + "-" + mode_name(mode) + "-" + seed_tag(seed);
}

SweepOutput summarize_sweep(const ExperimentManifest& m) {
  SweepOutput out;
  out.ratios = sweep_ratios();

  // mean-over-iterations averaged across seeds, per (method, ratio);
  // exploration-only cells never read demos, so one value covers all ratios.
  std::map<std::string, std::vector<double>> reward;
  for (Mode mode : m.methods) {
    std::string label = mode_name(mode);
    std::vector<double>& per_ratio = reward[label];
    for (double ratio : out.ratios) {
      std::vector<double> means;
      for (std::uint64_t seed : m.seeds) {
        means.push_back(stats_for_run(run_csv(m, sweep_run_name(mode, ratio, seed))).mean);
      }
      double mean = 0.0, stddev = 0.0;
      mean_std(means, mean, stddev);
      per_ratio.push_back(mean);
    }
  }

  const std::vector<double>& lfnd = reward.at(mode_name(Mode::kLfnd));
  for (Mode mode : m.methods) {
    std::string label = mode_name(mode);
    std::vector<double> imp;
    for (std::size_t i = 0; i < out.ratios.size(); ++i) {
      double base = reward.at(label)[i];
      imp.push_back((lfnd[i] - base) / std::max(std::abs(base), 1e-6));
    }
    out.improvement[label] = imp;
  }

  out.improvement_csv = path_join(m.out_dir, "improvement.csv");
  {
    std::ofstream csv(out.improvement_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw ParseError("cannot open " + out.improvement_csv + " for writing");
    csv << "baseline,ratio,baseline_reward,lfnd_reward,improvement\n";
    for (Mode mode : m.methods) {
      std::string label = mode_name(mode);
      for (std::size_t i = 0; i < out.ratios.size(); ++i) {
        csv << label << ',' << fmt_ratio(out.ratios[i]) << ','
            << fmt_double(reward.at(label)[i]) << ',' << fmt_double(lfnd[i]) << ','
            << fmt_double(out.improvement.at(label)[i]) << '\n';
      }
    }
  }

  std::vector<std::string> bar_labels;
  for (Mode mode : m.methods) {
    if (mode != Mode::kLfnd) bar_labels.push_back(mode_name(mode));
  }
  std::vector<BarGroup> groups;
  for (std::size_t i = 0; i < out.ratios.size(); ++i) {
    BarGroup g;
    g.category = fmt_ratio(out.ratios[i]);
    for (const std::string& label : bar_labels) g.values.push_back(out.improvement.at(label)[i]);
    groups.push_back(g);
  }
  ChartOptions options;
  options.title = "demo noise sweep on " + m.base.env_id;
  options.x_label = "noise ratio";
  options.y_label = "improvement over baseline";
  out.bars_svg = path_join(m.out_dir, "improvement.svg");
  render_bars(bar_labels, groups, options, out.bars_svg);
  return out;
}

}  // namespace

SweepOutput cmd_noise_sweep(const ExperimentManifest& m) {
  validate_common(m);
  require(!m.methods.empty(), "noise sweep needs at least one method");
  require(std::count(m.methods.begin(), m.methods.end(), Mode::kLfnd) == 1,
          "noise sweep needs the joint method among its methods");
  require(!m.expert_path.empty() && !m.immature_path.empty(),
          "noise sweep regenerates demos and needs expert and immature checkpoints");
  ensure_dir(runs_dir(m));
  ensure_dir(path_join(m.out_dir, "demos"));

  std::uint64_t demo_seed = splitmix64(m.base.seed ^ fnv1a64("sweep-demos"));
  std::vector<double> ratios = sweep_ratios();
  for (double ratio : ratios) {
    cmd_gen_demos(m.expert_path, m.immature_path, m.base.env_id, m.demo_count, ratio, demo_seed,
                  m.base.loss.gamma, sweep_demo_path(m, ratio));
  }

  std::vector<Cell> cells;
  for (Mode mode : m.methods) {
    if (mode == Mode::kRlOnly) {
      for (std::uint64_t seed : m.seeds) {
        std::string name = sweep_run_name(mode, 0.0, seed);
        cells.push_back({name, cell_config(m, mode, seed, name, ""), {}});
      }
      continue;
    }
    for (double ratio : ratios) {
      for (std::uint64_t seed : m.seeds) {
        std::string name = sweep_run_name(mode, ratio, seed);
        cells.push_back(
            {name, cell_config(m, mode, seed, name, sweep_demo_path(m, ratio)), {}});
      }
    }
  }
  run_cells(cells);
  return summarize_sweep(m);
}

// ---------------------------------------------------------------------------
// Weight deciles.

namespace {

struct GroupInfo {
  std::vector<DemoInstance> instances;
  double mean_weight = 0.0;
  double noisy_fraction = 0.0;
};

std::string group_demo_path(const ExperimentManifest& m, std::uint64_t seed, int group) {
  return path_join(path_join(m.out_dir, "groups"),
                   seed_tag(seed) + "-g" + std::to_string(group) + ".jsonl");
}

std::string weight_dump_path(const ExperimentManifest& m, const std::string& run_name) {
  return path_join(dumps_dir(m), run_name + ".csv");
}

// Average each instance's weight across the dumped iterations and split the
// instances into 10 groups of near-equal size ordered by that average.
std::vector<GroupInfo> group_by_average_weight(const DemoSet& demos,
                                               const std::string& dump_path) {
  std::vector<WeightRecord> records = read_weight_records_csv(dump_path);
  std::map<std::pair<std::string, int>, std::pair<double, int>> sums;
  for (const WeightRecord& r : records) {
    auto& slot = sums[{r.trajectory_id, r.step_index}];
    slot.first += r.weight;
    slot.second += 1;
  }

  std::map<std::pair<std::string, int>, const DemoInstance*> lookup;
  for (const Trajectory& traj : demos.trajectories) {
    for (std::size_t j = 0; j < traj.instances.size(); ++j) {
      lookup[{traj.id, static_cast<int>(j)}] = &traj.instances[j];
    }
  }
  if (sums.size() != lookup.size()) {
    throw DomainError("weight dump " + dump_path + " covers " + std::to_string(sums.size()) +
                      " instances but the demo set has " + std::to_string(lookup.size()));
  }

  struct Entry {
    double avg = 0.0;
    std::string traj_id;
    int step = 0;
    const DemoInstance* instance = nullptr;
  };
  std::vector<Entry> entries;
  for (const auto& [key, sum] : sums) {
    auto found = lookup.find(key);
    if (found == lookup.end()) {
      throw DomainError("weight dump " + dump_path + " references unknown instance '" +
                        key.first + "' step " + std::to_string(key.second));
    }
    entries.push_back({sum.first / sum.second, key.first, key.second, found->second});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.avg, a.traj_id, a.step) < std::tie(b.avg, b.traj_id, b.step);
  });

  std::size_t n = entries.size();
  if (n < 10) {
    throw ConfigError("weight grouping needs at least 10 demo instances, got " +
                      std::to_string(n));
  }
  std::vector<GroupInfo> groups(10);
  std::size_t base = n / 10, extra = n % 10, at = 0;
  for (std::size_t g = 0; g < 10; ++g) {
    std::size_t size = base + (g < extra ? 1 : 0);
    GroupInfo& info = groups[g];
    for (std::size_t i = 0; i < size; ++i, ++at) {
      info.instances.push_back(*entries[at].instance);
      info.mean_weight += entries[at].avg;
      if (entries[at].instance->is_noisy) info.noisy_fraction += 1.0;
    }
    info.mean_weight /= static_cast<double>(size);
    info.noisy_fraction /= static_cast<double>(size);
  }
  return groups;
}

std::string decile_run_name(std::uint64_t seed, int group) {
  return "il-" + seed_tag(seed) + "-g" + std::to_string(group);
}

WeightGroupsOutput summarize_weight_groups(const ExperimentManifest& m) {
  DemoSet demos = load_demos(m.demo_path);
  WeightGroupsOutput out;
  for (std::uint64_t seed : m.seeds) {
    std::string lfnd_name = std::string(mode_name(Mode::kLfnd)) + "-" + seed_tag(seed);
    std::vector<GroupInfo> groups = group_by_average_weight(demos, weight_dump_path(m, lfnd_name));
    for (int g = 1; g <= 10; ++g) {
      const GroupInfo& info = groups[g - 1];
      std::vector<IterationMetrics> metrics =
          read_metrics_csv(run_csv(m, decile_run_name(seed, g)));
      if (metrics.empty()) throw ParseError(decile_run_name(seed, g) + ": no metric rows");
      DecileRow row;
      row.seed = seed;
      row.group = g;
      row.size = info.instances.size();
      row.mean_weight = info.mean_weight;
      row.noisy_fraction = info.noisy_fraction;
      row.il_max = metrics.front().mean_episode_return;
      for (const IterationMetrics& it : metrics) {
        row.il_mean += it.mean_episode_return;
        row.il_max = std::max(row.il_max, it.mean_episode_return);
      }
      row.il_mean /= static_cast<double>(metrics.size());
      row.il_final = metrics.back().mean_episode_return;
      out.rows.push_back(row);
    }
  }

  out.deciles_csv = path_join(m.out_dir, "deciles.csv");
  {
    std::ofstream csv(out.deciles_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw ParseError("cannot open " + out.deciles_csv + " for writing");
    csv << "seed,group,size,mean_weight,il_mean,il_max,il_final,noisy_fraction\n";
    for (const DecileRow& r : out.rows) {
      csv << r.seed << ',' << r.group << ',' << r.size << ',' << fmt_double(r.mean_weight) << ','
          << fmt_double(r.il_mean) << ',' << fmt_double(r.il_max) << ',' << fmt_double(r.il_final)
          << ',' << fmt_double(r.noisy_fraction) << '\n';
    }
  }

  // Bars: deciles on the x axis, seed-averaged imitation scores plus the
  // ground-truth noisy fraction per group.
  std::vector<std::string> bar_labels = {"il_mean", "il_max", "il_final", "noisy_fraction"};
  std::vector<BarGroup> groups;
  for (int g = 1; g <= 10; ++g) {
    BarGroup bg;
    bg.category = "g" + std::to_string(g);
    double il_mean = 0.0, il_max = 0.0, il_final = 0.0, noisy = 0.0;
    for (const DecileRow& r : out.rows) {
      if (r.group != g) continue;
      il_mean += r.il_mean;
      il_max += r.il_max;
      il_final += r.il_final;
      noisy += r.noisy_fraction;
    }
    double n = static_cast<double>(m.seeds.size());
    bg.values = {il_mean / n, il_max / n, il_final / n, noisy / n};
    groups.push_back(bg);
  }
  ChartOptions options;
  options.title = "imitation score by weight decile on " + m.base.env_id;
  options.x_label = "average-weight decile (low to high)";
  options.y_label = "score";
  out.figure_svg = path_join(m.out_dir, "deciles.svg");
  render_bars(bar_labels, groups, options, out.figure_svg);
  return out;
}

}  // namespace

WeightGroupsOutput cmd_weight_groups(const ExperimentManifest& m) {
  validate_common(m);
  require(!m.demo_path.empty(), "weight grouping needs a demo file");
  ensure_dir(runs_dir(m));
  ensure_dir(dumps_dir(m));
  ensure_dir(path_join(m.out_dir, "groups"));
  DemoSet demos = load_demos(m.demo_path);

  std::vector<Cell> lfnd_cells;
  for (std::uint64_t seed : m.seeds) {
    std::string name = std::string(mode_name(Mode::kLfnd)) + "-" + seed_tag(seed);
    TrainConfig c = cell_config(m, Mode::kLfnd, seed, name, m.demo_path);
    c.weight_dump_path = weight_dump_path(m, name);
    lfnd_cells.push_back({name, c, {c.weight_dump_path}});
  }
  run_cells(lfnd_cells);

  std::vector<Cell> il_cells;
  for (std::uint64_t seed : m.seeds) {
    std::string lfnd_name = std::string(mode_name(Mode::kLfnd)) + "-" + seed_tag(seed);
    std::vector<GroupInfo> groups = group_by_average_weight(demos, weight_dump_path(m, lfnd_name));
    for (int g = 1; g <= 10; ++g) {
      Trajectory traj;
      traj.id = seed_tag(seed) + "-g" + std::to_string(g);
      traj.instances = groups[g - 1].instances;
      DemoSet group_set;
      group_set.env_id = demos.env_id;
      group_set.gamma = demos.gamma;
      group_set.trajectories.push_back(std::move(traj));
      std::string demo_file = group_demo_path(m, seed, g);
      save_demos(group_set, demo_file);

      std::string name = decile_run_name(seed, g);
      il_cells.push_back({name, cell_config(m, Mode::kIlOnly, seed, name, demo_file), {}});
    }
  }
  run_cells(il_cells);
  return summarize_weight_groups(m);
}

// ---------------------------------------------------------------------------
// Weighting-strategy ablation.

namespace {

struct FormSpec {
  std::string label;
  WeightForm form;
};

std::vector<FormSpec> weight_form_grid() {
  return {{"onezero", WeightForm::one_zero()},
          {"linear10", WeightForm::linear(10.0)},
          {"linear20", WeightForm::linear(20.0)},
          {"log", WeightForm::log()}};
}

WeightFormsOutput summarize_weight_forms(const ExperimentManifest& m) {
  WeightFormsOutput out;
  std::vector<Series> series;
  for (const FormSpec& spec : weight_form_grid()) {
    std::vector<std::string> paths = method_csvs(m, spec.label);
    out.summary.push_back(summarize_runs(spec.label, paths));
    series.push_back(mean_series(spec.label, paths));
  }
  {
    std::string label = mode_name(Mode::kRlOnly);
    std::vector<std::string> paths = method_csvs(m, label);
    out.summary.push_back(summarize_runs(label, paths));
    series.push_back(mean_series(label, paths));
  }

  out.summary_csv = path_join(m.out_dir, "summary.csv");
  write_summary_csv(out.summary_csv, out.summary);

  ChartOptions options;
  options.title = "weighting strategies on " + m.base.env_id;
  if (!m.demo_path.empty()) {
    options.hlines.push_back({demoset_stats(load_demos(m.demo_path)).mean_return, "expert"});
  }
  out.curves_svg = path_join(m.out_dir, "curves.svg");
  render_curves(series, options, out.curves_svg);
  return out;
}

}  // namespace

WeightFormsOutput cmd_weight_forms(const ExperimentManifest& m) {
  validate_common(m);
  require(!m.demo_path.empty(), "weighting ablation needs a demo file");
  ensure_dir(runs_dir(m));
  ensure_dir(dumps_dir(m));

  std::vector<Cell> cells;
  for (const FormSpec& spec : weight_form_grid()) {
    for (std::uint64_t seed : m.seeds) {
      std::string name = spec.label + "-" + seed_tag(seed);
      TrainConfig c = cell_config(m, Mode::kLfnd, seed, name, m.demo_path);
      c.weight_form = spec.form;
      c.weight_dump_path = weight_dump_path(m, name);
      cells.push_back({name, c, {c.weight_dump_path}});
    }
  }
  for (std::uint64_t seed : m.seeds) {
    std::string name = std::string(mode_name(Mode::kRlOnly)) + "-" + seed_tag(seed);
    cells.push_back({name, cell_config(m, Mode::kRlOnly, seed, name, ""), {}});
  }
  run_cells(cells);
  return summarize_weight_forms(m);
}

void cmd_render(const ExperimentManifest& m) {
  validate_common(m);
  switch (m.kind) {
    case ExperimentManifest::Kind::kCompare:
      summarize_compare(m);
      return;
    case ExperimentManifest::Kind::kNoiseSweep:
      summarize_sweep(m);
      return;
    case ExperimentManifest::Kind::kWeightGroups:
      summarize_weight_groups(m);
      return;
    case ExperimentManifest::Kind::kWeightForms:
      summarize_weight_forms(m);
      return;
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace dwrl
