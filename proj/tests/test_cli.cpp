// End-to-end checks of the command-line binary: flag plumbing, config-file
// precedence, exit codes, and a small expert -> demos -> compare pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dwrl/demos.hpp"
#include "dwrl/trainer.hpp"
#include "support/tmpdir.hpp"

using namespace dwrl;
using dwrl::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& output_file = "") {
  std::string cmd = std::string(DWRL_CLI_PATH) + " " + args;
  cmd += output_file.empty() ? std::string(" >/dev/null 2>&1")
                             : " >" + output_file + " 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared small-scale flags so every invocation finishes in milliseconds.
const char* kSmall = "--set steps_per_iteration=64 --set hidden=16 --set eval_episodes=2";

}  // namespace

TEST_CASE("usage errors and help map to the documented exit codes") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("no-such-subcommand") == 2);
  CHECK(run_cli("train --env gridworld8 --mode rl --no-such-flag 1") == 2);
}

TEST_CASE("train runs a configuration and reports the final return") {
  TempDir dir;
  std::string metrics = dir.file("m.csv");
  std::string log = dir.file("log.txt");
  int rc = run_cli("train --env gridworld8 --mode rl --iterations 2 --seed 3 " +
                       std::string(kSmall) + " --out " + metrics,
                   log);
  CHECK(rc == 0);
  CHECK(read_metrics_csv(metrics).size() == 2);
  std::string text = slurp(log);
  CHECK(text.find("iterations=2") != std::string::npos);
  CHECK(text.find("env_steps=128") != std::string::npos);
}

TEST_CASE("explicit flags override the config file and --set overrides both") {
  TempDir dir;
  std::string cfg = dir.file("run.cfg");
  {
    std::ofstream out(cfg);
    out << "env = gridworld8\n"
        << "mode = rl\n"
        << "iterations = 3\n"
        << "steps_per_iteration = 64\n"
        << "hidden = 16\n"
        << "eval_episodes = 2\n";
  }
  std::string metrics = dir.file("m.csv");
  CHECK(run_cli("train --config " + cfg + " --iterations 2 --set iterations=1 --out " + metrics) ==
        0);
  CHECK(read_metrics_csv(metrics).size() == 1);
}

TEST_CASE("configuration problems exit 2 and numeric failures exit 3") {
  TempDir dir;
  CHECK(run_cli("train --env no-such-env --mode rl --iterations 1 " + std::string(kSmall)) == 2);
  CHECK(run_cli("train --env gridworld8 --mode rl --set bogus_key=1") == 2);
  CHECK(run_cli("train --env gridworld8 --mode rl --set nonsense") == 2);
  CHECK(run_cli("train --env gridworld8 --mode il --iterations 1") == 2);  // demos missing

  // A demo trajectory whose return-to-go overflows makes the loss non-finite.
  DemoSet demos;
  demos.env_id = "gridworld8";
  demos.gamma = 0.99;
  Trajectory traj;
  traj.id = "hot";
  for (int j = 0; j < 2; ++j) {
    DemoInstance inst;
    inst.state.assign(64, 0.0);
    inst.state[0] = 1.0;
    inst.expert_action = Action::discrete(0);
    inst.action_probs = {1.0, 0.0, 0.0, 0.0};
    inst.reward = 1e308;
    traj.instances.push_back(inst);
  }
  demos.trajectories.push_back(traj);
  std::string hot = dir.file("hot.jsonl");
  save_demos(demos, hot);
  CHECK(run_cli("train --env gridworld8 --mode lfnd --weight-form linear10 --set lambda=0 "
                "--iterations 2 " +
                std::string(kSmall) + " --demos " + hot) == 3);
}

TEST_CASE("the expert, demos, compare and render subcommands chain together") {
  TempDir dir;
  std::string expert_dir = dir.file("expert");
  std::string log = dir.file("log.txt");

  int rc = run_cli("train-expert --env gridworld8 --iterations 2 --seed 7 --immature-fraction 0.5 " +
                       std::string(kSmall) + " --out " + expert_dir,
                   log);
  CHECK(rc == 0);
  CHECK(fs::exists(expert_dir + "/expert.dwrl"));
  CHECK(fs::exists(expert_dir + "/immature.dwrl"));

  std::string demo_file = dir.file("demos.jsonl");
  rc = run_cli("gen-demos --expert " + expert_dir + "/expert.dwrl --immature " + expert_dir +
                   "/immature.dwrl --env gridworld8 --count 3 --noise-ratio 0.4 --seed 5 --out " +
                   demo_file,
               log);
  CHECK(rc == 0);
  CHECK(slurp(log).find("3 trajectories, 1 noisy") != std::string::npos);

  std::string out_dir = dir.file("cmp");
  std::string grid_flags = "--env gridworld8 --iterations 2 --methods rl il --seeds 4 " +
                           std::string(kSmall) + " --demos " + demo_file + " --out " + out_dir;
  rc = run_cli("compare " + grid_flags, log);
  CHECK(rc == 0);
  CHECK(fs::exists(out_dir + "/runs/rl-s4.csv.ok"));
  CHECK(fs::exists(out_dir + "/summary.csv"));
  CHECK(fs::exists(out_dir + "/curves.svg"));
  std::string text = slurp(log);
  CHECK(text.find("expert") != std::string::npos);

  std::string svg_before = slurp(out_dir + "/curves.svg");
  fs::remove(out_dir + "/curves.svg");
  rc = run_cli("render --kind compare " + grid_flags, log);
  CHECK(rc == 0);
  CHECK(slurp(out_dir + "/curves.svg") == svg_before);

  CHECK(run_cli("render --kind bogus " + grid_flags) == 2);
}
