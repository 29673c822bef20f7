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

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>

#include "mintygym/harness.hpp"

namespace {

using mintygym::harness::ExperimentConfig;

void add_game_options(CLI::App* cmd, ExperimentConfig& config) {
  cmd->add_option("--game", config.game_path, "game file to load");
  cmd->add_option("--kind", config.kind,
                  "generator when no file is given: two-player-zero-sum, "
                  "polymatrix, ratio, minty");
  cmd->add_option("--players", config.players, "player count (polymatrix)");
  cmd->add_option("--states", config.states, "state count");
  cmd->add_option("--actions", config.actions,
                  "actions per player (single value broadcasts)");
  cmd->add_option("--zeta", config.zeta, "termination margin");
  cmd->add_flag("--switching", config.switching,
                "per-state controller (polymatrix)");
  cmd->add_option("--rows", config.rows, "ratio game rows");
  cmd->add_option("--cols", config.cols, "ratio game columns");
  cmd->add_option("--eps", config.minty_eps, "minty instance epsilon");
  cmd->add_option("--s", config.minty_s, "minty instance s");
}

void add_solver_options(CLI::App* cmd, ExperimentConfig& config) {
  cmd->add_option("--eta", config.eta, "learning rate");
  cmd->add_option("--iters", config.iters, "iteration count");
  cmd->add_option("--mode", config.mode,
                  "vanilla | weighted | weighted-estimated");
  cmd->add_option("--gamma", config.gamma, "greedy exploration rate");
  cmd->add_option("--noise-delta", config.noise_delta,
                  "relative operator noise level");
  cmd->add_option("--noise-rho", config.noise_rho,
                  "noise slack coefficient (reporting)");
  cmd->add_option("--slack-gamma", config.slack_gamma,
                  "Minty slack parameter (reporting)");
  cmd->add_option("--record-every", config.record_every, "record cadence");
  cmd->add_option("--rollouts", config.rollouts,
                  "rollouts per weight evaluation (0 = max(1000, iters))");
}

int dispatch(const std::string& command, const ExperimentConfig& config) {
  using namespace mintygym::harness;
  if (command == "solve") return cmd_solve(config);
  if (command == "appendix-c") return cmd_appendix_c(config);
  if (command == "check") return cmd_check(config);
  if (command == "gen") return cmd_gen(config);
  return kInvalidInput;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mintygym::harness;
  CLI::App app{
      "mintygym: weighted optimistic gradient descent for variational "
      "inequalities over products of simplices, with an exact tabular "
      "Markov-game engine"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global --seed/--out may follow the subcommand

  ExperimentConfig config;
  std::string config_path;
  // The config file loads before flag parsing, so explicit flags override
  // its values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  if (!config_path.empty()) {
    try {
      load_config_json(config_path, config);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInvalidInput;
    }
  }
  app.add_option("--config", config_path, "JSON config file (flags override)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", config.seed, "global seed");
  app.add_option("--out", config.out_dir, "output directory");

  auto* solve_cmd = app.add_subcommand(
      "solve", "run the solver on a game; writes trajectory.csv and "
               "solve_summary.json");
  add_game_options(solve_cmd, config);
  add_solver_options(solve_cmd, config);

  auto* appendix_cmd = app.add_subcommand(
      "appendix-c", "paired constant-step vs weighted comparison on random "
                    "ratio games");
  appendix_cmd->add_option("--rows", config.rows, "ratio game rows");
  appendix_cmd->add_option("--cols", config.cols, "ratio game columns");
  appendix_cmd->add_option("--instances", config.instances,
                           "number of random instances");
  appendix_cmd->add_option("--eta", config.eta, "learning rate");
  appendix_cmd->add_option("--iters", config.iters, "iteration count");
  appendix_cmd->add_flag("--desk", config.desk,
                         "scaled 20x24 suite with 10 instances");

  auto* check_cmd = app.add_subcommand(
      "check", "run the invariant battery; one line per property");
  check_cmd->add_option("--minty-k", config.minty_resolution,
                        "violation-search grid resolution");
  check_cmd
      ->add_flag("--corrupt-gradient", config.corrupt_gradient,
                 "negative control: inject gradient error")
      ->group("");  // hidden

  auto* gen_cmd = app.add_subcommand("gen", "generate a game file");
  add_game_options(gen_cmd, config);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    return dispatch(command, config);
  } catch (const mintygym::UnsupportedStructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnsupported;
  } catch (const mintygym::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const mintygym::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const mintygym::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const mintygym::NumericalFailureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
