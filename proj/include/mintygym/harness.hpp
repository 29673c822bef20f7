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
//
// Experiment orchestration used by the command-line tool: game sourcing,
// solver runs with CSV/JSON diagnostics, the paired ratio-game comparison,
// and the invariant-check battery.

#ifndef MINTYGYM_HARNESS_HPP_
#define MINTYGYM_HARNESS_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mintygym/check.hpp"
#include "mintygym/common.hpp"
#include "mintygym/estimators.hpp"
#include "mintygym/game_io.hpp"
#include "mintygym/game_zoo.hpp"
#include "mintygym/markov_game.hpp"
#include "mintygym/parallel.hpp"
#include "mintygym/vi.hpp"

namespace mintygym::harness {

using nlohmann::json;

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,            // I/O or unclassified error
  kInvalidInput = 2,       // bad arguments, parse or validation failure
  kUnsupported = 3,        // e.g. weighted mode without a single controller
  kNumericalFailure = 4,   // solver or linear-algebra failure
};

struct ExperimentConfig {
  // Game source: a file path, or a generator kind when the path is empty.
  std::string game_path;
  std::string kind = "two-player-zero-sum";  // | polymatrix | ratio | minty
  int players = 3;
  int states = 3;
  std::vector<int> actions{2, 2};
  double zeta = 0.3;
  bool switching = false;
  int rows = 100;  // ratio-game shape
  int cols = 120;
  double minty_eps = 0.1;
  double minty_s = 0.5;

  // Solver settings.
  double eta = 0.1;
  long long iters = 1000;
  std::string mode = "vanilla";  // | weighted | weighted-estimated
  double gamma = 0.0;
  double noise_delta = 0.0;
  double noise_rho = 0.0;
  double slack_gamma = 0.0;
  std::uint64_t seed = 0;
  long long record_every = 1;
  long long rollouts = 0;  // per-evaluation rollouts; 0 = max(1000, iters)

  // appendix-c settings.
  int instances = 9;
  bool desk = false;

  // check settings.
  int minty_resolution = 41;
  bool corrupt_gradient = false;  // negative-control hook

  std::string out_dir = ".";
};

inline void load_config_json(const std::string& path,
                             ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  auto get = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("game", config.game_path);
  get("kind", config.kind);
  get("players", config.players);
  get("states", config.states);
  get("actions", config.actions);
  get("zeta", config.zeta);
  get("switching", config.switching);
  get("rows", config.rows);
  get("cols", config.cols);
  get("minty_eps", config.minty_eps);
  get("minty_s", config.minty_s);
  get("eta", config.eta);
  get("iters", config.iters);
  get("mode", config.mode);
  get("gamma", config.gamma);
  get("noise_delta", config.noise_delta);
  get("noise_rho", config.noise_rho);
  get("slack_gamma", config.slack_gamma);
  get("seed", config.seed);
  get("record_every", config.record_every);
  get("rollouts", config.rollouts);
  get("instances", config.instances);
  get("desk", config.desk);
  get("minty_resolution", config.minty_resolution);
  get("out", config.out_dir);
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Complete-graph edge list used by the polymatrix generator.
inline std::vector<std::pair<int, int>> complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return edges;
}

inline MarkovGame make_game(const ExperimentConfig& config) {
  if (!config.game_path.empty()) return read_game(config.game_path);
  std::vector<int> actions = config.actions;
  if (static_cast<int>(actions.size()) == 1) {
    actions.assign(static_cast<std::size_t>(config.players), actions[0]);
  }
  if (config.kind == "two-player-zero-sum") {
    require(actions.size() == 2, "two-player-zero-sum needs two players");
    return two_player_zero_sum_single_controller(config.states, actions,
                                                 config.zeta, config.seed);
  }
  if (config.kind == "polymatrix") {
    require(static_cast<int>(actions.size()) == config.players,
            "polymatrix: one action count per player");
    return random_polymatrix_zero_sum(config.players, config.states, actions,
                                      config.zeta,
                                      complete_graph(config.players),
                                      config.switching, config.seed);
  }
  if (config.kind == "ratio") {
    return ratio_to_markov(
        random_ratio_game(config.rows, config.cols, config.seed));
  }
  if (config.kind == "minty") {
    return ratio_to_markov(
        minty_counterexample(config.minty_eps, config.minty_s));
  }
  throw InvalidInputError("unknown game kind: " + config.kind);
}

inline OperatorMode parse_mode(const std::string& mode) {
  if (mode == "vanilla") return OperatorMode::kVanilla;
  if (mode == "weighted") return OperatorMode::kWeighted;
  if (mode == "weighted-estimated") return OperatorMode::kWeightedEstimated;
  throw InvalidInputError("unknown mode: " + mode);
}

struct PreparedProblem {
  std::shared_ptr<const MarkovGame> game;
  WeightedVIProblem problem;
  std::shared_ptr<std::vector<double>> weight_audit;  // estimated mode only
};

inline PreparedProblem prepare_problem(const ExperimentConfig& config) {
  PreparedProblem out;
  out.game = std::make_shared<const MarkovGame>(make_game(config));
  const OperatorMode mode = parse_mode(config.mode);
  if (mode == OperatorMode::kWeightedEstimated) {
    const long long m =
        config.rollouts > 0 ? config.rollouts
                            : std::max<long long>(1000, config.iters);
    auto engine = RolloutEngine::create(
        out.game, SplitMix64::mix(config.seed, 0x5eed));
    out.weight_audit = std::make_shared<std::vector<double>>();
    out.problem = build_operator(
        out.game, mode, config.gamma,
        estimated_weight_map(engine, [m](long long) { return m; },
                             out.weight_audit));
  } else {
    out.problem = build_operator(out.game, mode, config.gamma);
  }
  if (config.noise_delta > 0.0) {
    auto base = out.problem.eval_F;
    const BlockSpace space = out.problem.space;
    out.problem = noisy_wrap(
        out.problem, config.noise_delta,
        [base, space](const Vec& x) { return vi_gap(space, x, base(x)); },
        SplitMix64::mix(config.seed, 0xA11CE));
  }
  return out;
}

inline SolverConfig solver_config(const ExperimentConfig& config) {
  SolverConfig sc;
  sc.eta = config.eta;
  sc.iterations = config.iters;
  sc.record_every = config.record_every;
  sc.seed = config.seed;
  sc.slack_gamma = config.slack_gamma;
  if (config.noise_delta > 0.0 || config.noise_rho > 0.0) {
    sc.noise = NoiseModel{config.noise_delta, config.noise_rho};
  }
  return sc;
}

// Fixed trajectory schema. ne_gap is filled when the attached game is small
// enough to re-plan per record, otherwise left empty. elapsed_ms is wall
// clock and is the one column exempt from byte-for-byte reproducibility.
inline constexpr const char* kCsvHeader =
    "t,eqgap,ne_gap,s_norm,path_partial,elapsed_ms";

class TrajectoryCsvWriter {
 public:
  TrajectoryCsvWriter(const std::string& path,
                      std::shared_ptr<const MarkovGame> game, double gamma)
      : out_(path), game_(std::move(game)), gamma_(gamma) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << kCsvHeader << "\n";
    start_ = std::chrono::steady_clock::now();
    compute_ne_gap_ =
        game_ != nullptr &&
        game_->joint_count() * game_->num_states() <= 1024;
  }

  void operator()(const IterateRecord& rec) {
    double path_partial = path_partial_;
    for (double s2 : rec.s2_blocks) path_partial += s2;
    path_partial_ = path_partial;
    double s_norm = 0.0;
    for (double s : rec.s_blocks) s_norm += s * s;
    s_norm = std::sqrt(s_norm);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start_)
            .count();
    out_ << rec.t << "," << format_g17(rec.eqgap) << ",";
    if (compute_ne_gap_) {
      PolicyProfile played = point_to_profile(*game_, rec.x);
      if (gamma_ > 0.0) played = greedy_map(*game_, played, gamma_);
      out_ << format_g17(ne_gap(*game_, played));
    }
    out_ << "," << format_g17(s_norm) << "," << format_g17(path_partial)
         << "," << elapsed << "\n";
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::shared_ptr<const MarkovGame> game_;
  double gamma_ = 0.0;
  bool compute_ne_gap_ = false;
  double path_partial_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

inline json constants_json(const TheoremConstants& c) {
  return json{{"d", c.d},
              {"diameter_squared", c.diameter_squared},
              {"h", c.h},
              {"ell", c.ell},
              {"lipschitz_F", c.lipschitz_F},
              {"b_f", c.b_f},
              {"alpha", c.alpha}};
}

inline json config_json(const ExperimentConfig& config) {
  return json{{"mode", config.mode},       {"eta", config.eta},
              {"iters", config.iters},     {"gamma", config.gamma},
              {"seed", config.seed},       {"record_every", config.record_every},
              {"noise_delta", config.noise_delta},
              {"noise_rho", config.noise_rho},
              {"slack_gamma", config.slack_gamma},
              {"kind", config.kind},       {"game", config.game_path}};
}

inline int cmd_solve(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  PreparedProblem prepared = prepare_problem(config);
  const TheoremConstants constants = theorem_constants(*prepared.game);

  const std::string csv_path =
      (fs::path(config.out_dir) / "trajectory.csv").string();
  const std::string json_path =
      (fs::path(config.out_dir) / "solve_summary.json").string();
  TrajectoryCsvWriter writer(csv_path, prepared.game,
                             config.gamma);

  json summary;
  summary["schema_version"] = 1;
  summary["experiment"] = "solve";
  summary["config"] = config_json(config);
  summary["constants"] = constants_json(constants);

  std::shared_ptr<SolveReport> report;
  bool aborted = false;
  try {
    report = std::make_shared<SolveReport>(
        solve(prepared.problem, solver_config(config),
              [&writer](const IterateRecord& rec) { writer(rec); }));
  } catch (const SolveAbortedError& e) {
    report = e.partial;
    aborted = true;
    summary["abort_reason"] = std::string(e.what());
  }

  summary["aborted"] = aborted;
  summary["iterations_completed"] = report->iterations_completed;
  if (!report->records.empty()) {
    summary["initial_eqgap"] = report->records.front().eqgap;
  }
  if (!aborted) {
    summary["best"] = {{"t", report->best.t}, {"eqgap", report->best.eqgap}};
    if (prepared.game->joint_count() * prepared.game->num_states() <= 1024) {
      PolicyProfile played = point_to_profile(*prepared.game, report->best.x);
      if (config.gamma > 0.0) {
        played = greedy_map(*prepared.game, played, config.gamma);
      }
      summary["best"]["ne_gap"] = ne_gap(*prepared.game, played);
    }
    summary["final_eqgap"] = report->records.back().eqgap;
    const auto audit = path_length_audit(
        *report, prepared.problem.space.diameter_squared(),
        prepared.problem.h, prepared.problem.ell);
    summary["path_length"] = {{"sum", audit.sum},
                              {"bound", audit.bound},
                              {"holds", audit.holds}};
    double rvu_min = std::numeric_limits<double>::infinity();
    double br_min = std::numeric_limits<double>::infinity();
    for (const auto& ledger : report->block_audits) {
      rvu_min = std::min(rvu_min, ledger.rvu_min_slack);
      br_min = std::min(br_min, ledger.br_min_slack);
    }
    summary["audits"] = {{"rvu_min_slack", rvu_min},
                         {"br_gap_min_slack", br_min},
                         {"max_block_operator_norm",
                          report->max_block_operator_norm},
                         {"operator_bound_violated",
                          report->operator_bound_violated}};
    if (prepared.weight_audit && !prepared.weight_audit->empty()) {
      summary["audits"]["weight_error_sup"] = *std::max_element(
          prepared.weight_audit->begin(), prepared.weight_audit->end());
    }
  }

  std::ofstream out(json_path);
  out << summary.dump(2) << "\n";
  return aborted ? kNumericalFailure : kOk;
}

struct AppendixCInstance {
  std::uint64_t seed = 0;
  double initial_gap = 0.0;
  double constant_final = 0.0, constant_best = 0.0;
  double weighted_final = 0.0, weighted_best = 0.0;
  double rvu_min_slack = 0.0;
  double br_min_slack = 0.0;
};

// Paired comparison on random ratio games: plain optimistic gradient descent
// with a constant learning rate versus the weighted update, both from the
// same initialization. Writes one paired trajectory file per instance plus a
// summary table.
inline int cmd_appendix_c(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const int rows = config.desk ? 20 : config.rows;
  const int cols = config.desk ? 24 : config.cols;
  const int instances = config.desk ? 10 : config.instances;

  std::vector<AppendixCInstance> results(
      static_cast<std::size_t>(instances));
  std::vector<std::string> errors(static_cast<std::size_t>(instances));

  parallel_for(static_cast<std::size_t>(instances), [&](std::size_t i) {
    try {
      const std::uint64_t seed =
          SplitMix64::mix(config.seed, static_cast<std::uint64_t>(i));
      const RatioGame ratio = random_ratio_game(rows, cols, seed);
      const auto game =
          std::make_shared<const MarkovGame>(ratio_to_markov(ratio));
      const auto vanilla = build_operator(game, OperatorMode::kVanilla);
      const auto weighted = build_operator(game, OperatorMode::kWeighted);

      SolverConfig sc;
      sc.eta = config.eta;
      sc.iterations = config.iters;
      sc.record_every = 1;
      sc.seed = seed;
      const SolveReport constant_run = solve(vanilla, sc);
      const SolveReport weighted_run = solve(weighted, sc);

      std::ofstream csv(fs::path(config.out_dir) /
                        ("appendix_c_instance_" + std::to_string(i) +
                         ".csv"));
      csv << "t,eqgap_constant,eqgap_weighted\n";
      for (std::size_t k = 0; k < constant_run.records.size(); ++k) {
        csv << constant_run.records[k].t << ","
            << format_g17(constant_run.records[k].eqgap) << ","
            << format_g17(weighted_run.records[k].eqgap) << "\n";
      }

      AppendixCInstance& r = results[i];
      r.seed = seed;
      r.initial_gap = weighted_run.records.front().eqgap;
      r.constant_final = constant_run.records.back().eqgap;
      r.constant_best = constant_run.best.eqgap;
      r.weighted_final = weighted_run.records.back().eqgap;
      r.weighted_best = weighted_run.best.eqgap;
      r.rvu_min_slack = std::numeric_limits<double>::infinity();
      r.br_min_slack = std::numeric_limits<double>::infinity();
      for (const SolveReport* run : {&constant_run, &weighted_run}) {
        for (const auto& ledger : run->block_audits) {
          r.rvu_min_slack = std::min(r.rvu_min_slack, ledger.rvu_min_slack);
          r.br_min_slack = std::min(r.br_min_slack, ledger.br_min_slack);
        }
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  for (const auto& err : errors) {
    if (!err.empty()) {
      std::cerr << "appendix-c instance failed: " << err << "\n";
      return kNumericalFailure;
    }
  }

  json summary;
  summary["schema_version"] = 1;
  summary["experiment"] = "appendix_c";
  summary["shape"] = {{"rows", rows}, {"cols", cols}};
  summary["eta"] = config.eta;
  summary["iters"] = config.iters;
  summary["seed"] = config.seed;
  bool all_decreased = true;
  json table = json::array();
  for (const auto& r : results) {
    table.push_back({{"seed", r.seed},
                     {"initial_gap", r.initial_gap},
                     {"constant", {{"final", r.constant_final},
                                   {"best", r.constant_best}}},
                     {"weighted", {{"final", r.weighted_final},
                                   {"best", r.weighted_best}}},
                     {"rvu_min_slack", r.rvu_min_slack},
                     {"br_gap_min_slack", r.br_min_slack}});
    all_decreased = all_decreased && r.weighted_best < r.initial_gap;
  }
  summary["instances"] = table;
  summary["weighted_best_below_initial_everywhere"] = all_decreased;
  std::ofstream out(std::filesystem::path(config.out_dir) /
                    "appendix_c_summary.json");
  out << summary.dump(2) << "\n";
  return kOk;
}

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// The invariant battery behind `check`. Every property runs on fixed seeds;
// the corrupt_gradient hook perturbs the analytic gradient so the negative
// control demonstrably fails. Properties are independent and evaluated in
// parallel; results are reduced in declaration order.
inline std::vector<CheckResult> run_check_battery(
    const ExperimentConfig& config) {
  std::vector<std::pair<std::string,
                        std::function<std::pair<double, double>()>>>
      properties;
  auto add = [&properties](const std::string& name, auto body) {
    properties.emplace_back(name, std::move(body));
  };
  const std::uint64_t seed = config.seed;
  const bool corrupt = config.corrupt_gradient;
  const int minty_k = config.minty_resolution;

  add("gradient-fd-consistency", [seed, corrupt] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 1));
    for (int trial = 0; trial < 5; ++trial) {
      const auto game = random_game(2 + trial % 2, 3,
                                    trial % 2 ? std::vector<int>{2, 2, 2}
                                              : std::vector<int>{2, 3},
                                    0.25, SplitMix64::mix(seed, 10 + trial));
      const auto profile = random_interior_profile(game, rng);
      worst = std::max(worst,
                       gradient_consistency_error(game, profile, 1e-5,
                                                  corrupt ? 1e-3 : 0.0));
    }
    return std::pair{worst, 1e-4};
  });

  add("value-difference-identity", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 2));
    for (int trial = 0; trial < 10; ++trial) {
      const auto game = random_game(3, 3, {2, 2, 2}, 0.25,
                                    SplitMix64::mix(seed, 20 + trial));
      const auto profile = random_interior_profile(game, rng);
      const auto other = random_interior_profile(game, rng);
      const int i = static_cast<int>(rng.next_u64() % 3);
      const auto audit = value_difference_audit(
          game, profile, i, other.policies[static_cast<std::size_t>(i)]);
      worst = std::max(worst, std::abs(audit.lhs - audit.rhs));
    }
    return std::pair{worst, 1e-8};
  });

  add("value-bounds", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 3));
    for (int trial = 0; trial < 5; ++trial) {
      const auto game =
          random_game(2, 3, {2, 3}, 0.25, SplitMix64::mix(seed, 30 + trial));
      const auto result = plan(game, random_interior_profile(game, rng));
      for (double v : result.values) {
        worst = std::max(worst, std::abs(v) - 1.0 / game.zeta());
      }
    }
    return std::pair{worst, 1e-9};
  });

  add("visitation-bounds", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 3));
    for (int trial = 0; trial < 5; ++trial) {
      const auto game =
          random_game(2, 3, {2, 3}, 0.25, SplitMix64::mix(seed, 30 + trial));
      const auto result = plan(game, random_interior_profile(game, rng));
      for (int s = 0; s < game.num_states(); ++s) {
        const double d =
            result.visit_unnormalized[static_cast<std::size_t>(s)];
        worst = std::max(worst, d - 1.0 / game.zeta());
        worst = std::max(worst,
                         game.rho()[static_cast<std::size_t>(s)] - d);
      }
    }
    return std::pair{worst, 1e-9};
  });

  add("single-controller-visitation", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 4));
    const auto game = two_player_zero_sum_single_controller(
        3, {2, 2}, 0.25, SplitMix64::mix(seed, 40));
    for (int trial = 0; trial < 5; ++trial) {
      auto a = random_interior_profile(game, rng);
      auto b = random_interior_profile(game, rng);
      b.policies[0] = a.policies[0];
      const auto da = plan(game, a).visit_unnormalized;
      const auto db = plan(game, b).visit_unnormalized;
      for (std::size_t s = 0; s < da.size(); ++s) {
        worst = std::max(worst, std::abs(da[s] - db[s]));
      }
    }
    return std::pair{worst, 1e-12};
  });

  add("zero-sum-value-identity", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 5));
    const auto game = two_player_zero_sum_single_controller(
        3, {2, 3}, 0.25, SplitMix64::mix(seed, 50));
    for (int trial = 0; trial < 5; ++trial) {
      const auto planned = plan(game, random_interior_profile(game, rng));
      worst = std::max(worst, std::abs(rho_value(game, planned, 0) +
                                       rho_value(game, planned, 1)));
    }
    return std::pair{worst, 1e-10};
  });

  add("gradient-dominance", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 6));
    for (int trial = 0; trial < 5; ++trial) {
      const auto game = two_player_zero_sum_single_controller(
          3, {2, 2}, 0.25, SplitMix64::mix(seed, 60 + trial));
      const auto profile = random_interior_profile(game, rng);
      for (int i = 0; i < 2; ++i) {
        const auto b = gradient_dominance_bound(game, profile, i);
        worst = std::max(worst,
                         b.value_gap - b.coefficient_bound * b.linear_gap);
      }
    }
    return std::pair{worst, 1e-9};
  });

  add("smoothness-bound", [seed] {
    const auto game =
        random_game(2, 2, {2, 2}, 0.5, SplitMix64::mix(seed, 70));
    const double observed = smoothness_probe(game, 20, seed);
    const double bound = 4.0 * 2.0 / std::pow(game.zeta(), 3.0);
    return std::pair{observed - bound, 0.0};
  });

  add("ratio-value-cross-oracle", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 7));
    for (int instance = 0; instance < 3; ++instance) {
      const RatioGame ratio =
          random_ratio_game(3, 4, SplitMix64::mix(seed, 80 + instance));
      const MarkovGame markov = ratio_to_markov(ratio);
      for (int t = 0; t < 5; ++t) {
        PolicyProfile profile;
        profile.policies = {random_simplex_point(rng, 3),
                            random_simplex_point(rng, 4)};
        const auto planned = plan(markov, profile);
        worst = std::max(
            worst, std::abs(rho_value(markov, planned, 1) -
                            ratio_value(ratio, profile.policies[0],
                                        profile.policies[1])));
      }
    }
    return std::pair{worst, 1e-10};
  });

  add("ratio-operator-cross-oracle", [seed] {
    double worst = 0.0;
    SplitMix64 rng(SplitMix64::mix(seed, 8));
    for (int instance = 0; instance < 3; ++instance) {
      const RatioGame ratio =
          random_ratio_game(3, 4, SplitMix64::mix(seed, 80 + instance));
      const auto markov =
          std::make_shared<const MarkovGame>(ratio_to_markov(ratio));
      const auto direct = ratio_operator(ratio);
      const auto embedded = build_operator(markov, OperatorMode::kVanilla);
      for (int t = 0; t < 5; ++t) {
        PolicyProfile profile;
        profile.policies = {random_simplex_point(rng, 3),
                            random_simplex_point(rng, 4)};
        const Vec x = profile_to_point(*markov, profile);
        Vec f1 = direct.eval_F(x);
        Vec f2 = embedded.eval_F(x);
        // Compare on the simplex tangents: per-block constant shifts stem
        // from the two off-simplex extensions and are dynamically inert.
        for (int r = 0; r < direct.space.block_count(); ++r) {
          auto b1 = direct.space.block(f1, r);
          auto b2 = direct.space.block(f2, r);
          double m1 = 0.0, m2 = 0.0;
          for (std::size_t k = 0; k < b1.size(); ++k) {
            m1 += b1[k];
            m2 += b2[k];
          }
          m1 /= static_cast<double>(b1.size());
          m2 /= static_cast<double>(b2.size());
          for (std::size_t k = 0; k < b1.size(); ++k) {
            worst = std::max(worst, std::abs((b1[k] - m1) - (b2[k] - m2)));
          }
        }
      }
    }
    return std::pair{worst, 1e-8};
  });

  // One theorem-parameter run shared by the three solver audits.
  struct AuditOutcome {
    double rvu = 0.0;
    double br = 0.0;
    double path_excess = 0.0;
  };
  auto audit_run = std::make_shared<AuditOutcome>();
  auto audit_once = std::make_shared<std::once_flag>();
  auto run_audits = [seed, audit_run] {
    const auto game = std::make_shared<const MarkovGame>(
        two_player_zero_sum_single_controller(3, {2, 2}, 0.25,
                                              SplitMix64::mix(seed, 90)));
    const auto problem = build_operator(game, OperatorMode::kWeighted);
    const auto constants = theorem_constants(*game);
    SolverConfig sc;
    sc.eta = theorem_step_size(constants.ell, constants.h,
                               constants.lipschitz_F, constants.b_f,
                               constants.alpha, constants.d);
    sc.iterations = iteration_budget(constants.diameter_squared, constants.h,
                                     constants.ell, 0.5);
    sc.record_every = sc.iterations;  // audits stream at every iterate anyway
    const SolveReport report = solve(problem, sc);
    double rvu_min = std::numeric_limits<double>::infinity();
    double br_min = std::numeric_limits<double>::infinity();
    for (const auto& ledger : report.block_audits) {
      rvu_min = std::min(rvu_min, ledger.rvu_min_slack);
      br_min = std::min(br_min, ledger.br_min_slack);
    }
    const auto audit = path_length_audit(report, constants.diameter_squared,
                                         constants.h, constants.ell);
    audit_run->rvu = -rvu_min;
    audit_run->br = -br_min;
    audit_run->path_excess = audit.sum - audit.bound;
  };
  auto ensure_audits = [audit_run, audit_once, run_audits] {
    std::call_once(*audit_once, run_audits);
  };
  add("rvu-audit", [audit_run, ensure_audits] {
    ensure_audits();
    return std::pair{audit_run->rvu, 1e-6};
  });
  add("br-gap-audit", [audit_run, ensure_audits] {
    ensure_audits();
    return std::pair{audit_run->br, 1e-9};
  });
  add("path-length-bound", [audit_run, ensure_audits] {
    ensure_audits();
    return std::pair{audit_run->path_excess, 0.0};
  });

  add("reduction-invariance", [seed] {
    const auto game = std::make_shared<const MarkovGame>(
        two_player_zero_sum_single_controller(2, {2, 2}, 0.3,
                                              SplitMix64::mix(seed, 91)));
    const auto vanilla = build_operator(game, OperatorMode::kVanilla);
    WeightedVIProblem unit_weights = vanilla;
    unit_weights.eval_A = [](const Vec& x) { return Vec(x.size(), 1.0); };
    SolverConfig sc;
    sc.eta = 0.05;
    sc.iterations = 100;
    const SolveReport a = solve(vanilla, sc);
    const SolveReport b = solve(unit_weights, sc);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      for (std::size_t i = 0; i < a.records[k].x.size(); ++i) {
        worst = std::max(worst,
                         std::abs(a.records[k].x[i] - b.records[k].x[i]));
      }
    }
    const auto explored = build_operator(game, OperatorMode::kVanilla, 0.0);
    const auto wrapped = noisy_wrap(
        vanilla, 0.0, [](const Vec&) { return 1.0; }, 1);
    SplitMix64 rng(SplitMix64::mix(seed, 92));
    const Vec x =
        profile_to_point(*game, random_interior_profile(*game, rng));
    const Vec f0 = vanilla.eval_F(x);
    const Vec f1 = explored.eval_F(x);
    const Vec f2 = wrapped.eval_F(x);
    for (std::size_t i = 0; i < f0.size(); ++i) {
      worst = std::max(worst, std::abs(f0[i] - f1[i]));
      worst = std::max(worst, std::abs(f0[i] - f2[i]));
    }
    return std::pair{worst, 1e-12};
  });

  add("minty-counterexample-certificate", [minty_k] {
    const auto cert =
        minty_violation_search(minty_counterexample(0.1, 0.5), minty_k);
    return std::pair{cert.valid ? cert.worst_violation : 1.0, -1e-6};
  });

  add("minty-monotone-control", [minty_k] {
    const auto control = minty_violation_search(
        RatioGame::create(2, 2, {1.0, -1.0, -1.0, 1.0}, Vec(4, 1.0)),
        minty_k);
    return std::pair{control.valid ? 1.0 : 0.0, 0.5};
  });

  add("estimated-weight-clamp", [seed] {
    const auto game = std::make_shared<const MarkovGame>(
        two_player_zero_sum_single_controller(3, {2, 2}, 0.25,
                                              SplitMix64::mix(seed, 93)));
    auto engine = RolloutEngine::create(game, SplitMix64::mix(seed, 94));
    auto weights =
        estimated_weight_map(engine, [](long long) { return 64; });
    const auto profile = PolicyProfile::uniform(*game);
    const double lo = game->zeta();
    const double hi =
        1.0 / *std::max_element(game->rho().begin(), game->rho().end());
    double worst = 0.0;
    for (long long eval = 0; eval < 3; ++eval) {
      for (double w : weights(profile.policies[0], eval)) {
        worst = std::max(worst, std::max(lo - w, w - hi));
      }
    }
    return std::pair{worst, 0.0};
  });

  // Properties are independent; evaluate them in parallel and reduce in
  // declaration order. The three solver audits share one run behind a
  // call_once.
  std::vector<CheckResult> results(properties.size());
  parallel_for(properties.size(), [&](std::size_t i) {
    const auto [worst, tol] = properties[i].second();
    results[i] = {properties[i].first, worst, tol, worst <= tol};
  });
  return results;
}


inline int cmd_check(const ExperimentConfig& config) {
  const auto results = run_check_battery(config);
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%s  %-32s  worst=%.3e  tol=%.3e\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.worst, r.tol);
    all_pass = all_pass && r.pass;
  }
  std::printf("%s: %zu properties checked\n", all_pass ? "OK" : "FAILED",
              results.size());
  return all_pass ? kOk : kFailure;
}

inline int cmd_gen(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const MarkovGame game = make_game(config);
  const std::string path =
      (fs::path(config.out_dir) / (config.kind + ".game")).string();
  write_game(game, path);
  std::printf("wrote %s (%d players, %d states, %lld joint actions)\n",
              path.c_str(), game.num_players(), game.num_states(),
              game.joint_count());
  return kOk;
}

}  // namespace mintygym::harness

#endif  // MINTYGYM_HARNESS_HPP_
