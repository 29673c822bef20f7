// Copyright 2026 The Mintygym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mintygym/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_games.hpp"

namespace mintygym::harness {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The elapsed_ms column is wall clock; strip it before comparing runs.
std::string strip_last_column(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << line.substr(0, pos) << "\n";
  }
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(testing::TempDir()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CmdSolve, ZeroRewardGameHasZeroGapAtFirstIterate) {
  const auto dir = fresh_dir("zero_reward");
  const auto game = mintygym::make_game(
      2, 2, {2, 2}, [](int, int, const std::vector<int>&) { return 0.0; },
      [](int, const std::vector<int>&, int) { return 0.2; }, {0.5, 0.5},
      0.5);
  write_game(game, (dir / "zero.game").string());

  ExperimentConfig config;
  config.game_path = (dir / "zero.game").string();
  config.eta = 0.1;
  config.iters = 20;
  config.out_dir = (dir / "run").string();
  ASSERT_EQ(cmd_solve(config), kOk);

  const auto summary = json::parse(slurp(dir / "run" / "solve_summary.json"));
  EXPECT_EQ(summary.at("best").at("eqgap").get<double>(), 0.0);
  EXPECT_EQ(summary.at("best").at("t").get<long long>(), 1);
  EXPECT_FALSE(summary.at("aborted").get<bool>());
}

TEST(CmdSolve, ReRunsAreByteIdenticalUpToTiming) {
  const auto dir = fresh_dir("determinism");
  ExperimentConfig config;
  config.kind = "two-player-zero-sum";
  config.states = 3;
  config.actions = {2, 2};
  config.zeta = 0.25;
  config.seed = 5;
  config.eta = 0.05;
  config.iters = 300;
  config.mode = "weighted";

  config.out_dir = (dir / "a").string();
  ASSERT_EQ(cmd_solve(config), kOk);
  config.out_dir = (dir / "b").string();
  ASSERT_EQ(cmd_solve(config), kOk);

  EXPECT_EQ(strip_last_column(slurp(dir / "a" / "trajectory.csv")),
            strip_last_column(slurp(dir / "b" / "trajectory.csv")));
  EXPECT_EQ(slurp(dir / "a" / "solve_summary.json"),
            slurp(dir / "b" / "solve_summary.json"));

  const std::string header = slurp(dir / "a" / "trajectory.csv");
  EXPECT_EQ(header.substr(0, header.find('\n')), kCsvHeader);
}

TEST(CmdSolve, WeightedModeWithoutControllerProducesNoFiles) {
  const auto dir = fresh_dir("no_controller");
  const auto game = mintygym::make_game(
      2, 2, {2, 2}, [](int, int, const std::vector<int>&) { return 0.0; },
      [](int, const std::vector<int>& a, int s2) {
        return (a[0] == a[1] ? 0.6 : 0.1) * (s2 == 0 ? 1.0 : 0.0);
      },
      {0.5, 0.5}, 0.4);
  write_game(game, (dir / "joint.game").string());

  ExperimentConfig config;
  config.game_path = (dir / "joint.game").string();
  config.mode = "weighted";
  config.out_dir = (dir / "run").string();
  EXPECT_THROW(cmd_solve(config), UnsupportedStructureError);
  EXPECT_FALSE(fs::exists(dir / "run" / "trajectory.csv"));
  EXPECT_FALSE(fs::exists(dir / "run" / "solve_summary.json"));
}

TEST(CmdSolve, NoisyAndExploredRunsComplete) {
  const auto dir = fresh_dir("noisy");
  ExperimentConfig config;
  config.kind = "two-player-zero-sum";
  config.states = 2;
  config.actions = {2, 2};
  config.zeta = 0.3;
  config.eta = 0.05;
  config.iters = 100;
  config.mode = "weighted";
  config.gamma = 0.1;
  config.noise_delta = 0.01;
  config.out_dir = dir.string();
  ASSERT_EQ(cmd_solve(config), kOk);
  const auto summary = json::parse(slurp(dir / "solve_summary.json"));
  EXPECT_EQ(summary.at("config").at("noise_delta").get<double>(), 0.01);
  EXPECT_EQ(summary.at("config").at("gamma").get<double>(), 0.1);
}

TEST(CmdAppendixC, DeskShapeWritesPairedTrajectories) {
  const auto dir = fresh_dir("appc");
  ExperimentConfig config;
  config.desk = true;
  config.iters = 300;
  config.seed = 11;
  config.out_dir = dir.string();
  ASSERT_EQ(cmd_appendix_c(config), kOk);

  int files = 0;
  for (int i = 0; i < 10; ++i) {
    const fs::path f = dir / ("appendix_c_instance_" + std::to_string(i) +
                              ".csv");
    ASSERT_TRUE(fs::exists(f));
    ++files;
    // Both variants share the initialization, so the t = 0 gaps agree.
    std::ifstream in(f);
    std::string header, first;
    std::getline(in, header);
    EXPECT_EQ(header, "t,eqgap_constant,eqgap_weighted");
    std::getline(in, first);
    const auto c1 = first.find(',');
    const auto c2 = first.rfind(',');
    EXPECT_EQ(first.substr(c1 + 1, c2 - c1 - 1), first.substr(c2 + 1));
  }
  EXPECT_EQ(files, 10);

  const auto summary = json::parse(slurp(dir / "appendix_c_summary.json"));
  EXPECT_TRUE(
      summary.at("weighted_best_below_initial_everywhere").get<bool>());
  EXPECT_EQ(summary.at("instances").size(), 10u);
}

TEST(CmdCheck, BatteryPassesAndNegativeControlFails) {
  ExperimentConfig config;
  config.seed = 1;
  config.minty_resolution = 21;
  EXPECT_EQ(cmd_check(config), kOk);
  config.corrupt_gradient = true;
  EXPECT_EQ(cmd_check(config), kFailure);
  const auto results = run_check_battery(config);
  int failures = 0;
  for (const auto& r : results) failures += r.pass ? 0 : 1;
  EXPECT_EQ(failures, 1);  // exactly the corrupted property
  EXPECT_EQ(results.size(), 17u);  // the documented property count
}

TEST(CmdGen, WritesLoadableGame) {
  const auto dir = fresh_dir("gen");
  ExperimentConfig config;
  config.kind = "polymatrix";
  config.players = 3;
  config.states = 2;
  config.actions = {2};
  config.zeta = 0.3;
  config.seed = 77;
  config.out_dir = dir.string();
  ASSERT_EQ(cmd_gen(config), kOk);
  const MarkovGame game = read_game((dir / "polymatrix.game").string());
  EXPECT_EQ(game.num_players(), 3);
  EXPECT_EQ(single_controller_of(game), 0);
}

TEST(ConfigFile, LoadsAndOverrides) {
  const auto dir = fresh_dir("config");
  {
    std::ofstream out(dir / "config.json");
    out << R"({"eta": 0.25, "iters": 42, "mode": "weighted",
               "kind": "ratio", "rows": 5, "cols": 6, "seed": 9})";
  }
  ExperimentConfig config;
  load_config_json((dir / "config.json").string(), config);
  EXPECT_EQ(config.eta, 0.25);
  EXPECT_EQ(config.iters, 42);
  EXPECT_EQ(config.mode, "weighted");
  EXPECT_EQ(config.rows, 5);
  EXPECT_EQ(config.seed, 9u);
  EXPECT_THROW(load_config_json((dir / "missing.json").string(), config),
               ParseError);
  {
    std::ofstream out(dir / "bad.json");
    out << "{not json";
  }
  EXPECT_THROW(load_config_json((dir / "bad.json").string(), config),
               ParseError);
}

TEST(MakeGame, GeneratorKinds) {
  ExperimentConfig config;
  config.kind = "minty";
  const MarkovGame minty = make_game(config);
  EXPECT_EQ(minty.num_states(), 1);
  EXPECT_EQ(minty.joint_count(), 4);

  config.kind = "ratio";
  config.rows = 4;
  config.cols = 7;
  const MarkovGame ratio = make_game(config);
  EXPECT_EQ(ratio.joint_count(), 28);

  config.kind = "nonsense";
  EXPECT_THROW(make_game(config), InvalidInputError);
}

}  // namespace
}  // namespace mintygym::harness
