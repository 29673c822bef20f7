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

#include "mintygym/vi.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "mintygym/block_space.hpp"
#include "mintygym/random.hpp"

namespace mintygym {
namespace {

// Matching-pennies saddle operator F(x) = (A y, -A' x): monotone, so plain
// optimistic gradient descent converges on it.
WeightedVIProblem pennies_problem() {
  BlockSpace space({2, 2});
  auto f = [](const Vec& x) {
    // Payoff A = ((1, -1), (-1, 1)) for the minimizing row player.
    const double y0 = x[2], y1 = x[3];
    const double x0 = x[0], x1 = x[1];
    return Vec{y0 - y1, y1 - y0, -(x0 - x1), -(x1 - x0)};
  };
  return WeightedVIProblem::vanilla(space, f);
}

// Reference implementation: textbook unweighted optimistic gradient descent,
// independent of the solver loop under test.
std::vector<Vec> reference_ogd(const BlockSpace& space,
                               const std::function<Vec(const Vec&)>& f,
                               double eta, long long iters,
                               const Vec& initial) {
  std::vector<Vec> trajectory;
  Vec x_hat = initial;
  Vec f_prev = f(initial);
  for (long long t = 1; t <= iters; ++t) {
    Vec shifted = x_hat;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      shifted[i] -= eta * f_prev[i];
    }
    Vec x = project_blockwise(space, shifted);
    Vec fx = f(x);
    Vec shifted_hat = x_hat;
    for (std::size_t i = 0; i < shifted_hat.size(); ++i) {
      shifted_hat[i] -= eta * fx[i];
    }
    x_hat = project_blockwise(space, shifted_hat);
    f_prev = std::move(fx);
    trajectory.push_back(std::move(x));
  }
  return trajectory;
}

TEST(OgdIterate, ZeroOperatorIsFixedPoint) {
  BlockSpace space({2, 2});
  auto problem = WeightedVIProblem::vanilla(
      space, [](const Vec& x) { return Vec(x.size(), 0.0); });
  OgdState state;
  state.x_prev = space.centroid();
  state.x_hat = space.centroid();
  state.f_prev = Vec(4, 0.0);
  state.a_prev = Vec(4, 1.0);
  const OgdStep step = ogd_iterate(problem, 0.3, state);
  EXPECT_EQ(step.x, space.centroid());
  EXPECT_EQ(step.x_hat_next, space.centroid());
}

TEST(OgdIterate, HandComputedAffineStep) {
  BlockSpace space({2});
  auto problem = WeightedVIProblem::vanilla(
      space, [](const Vec&) { return Vec{1.0, 0.0}; });
  OgdState state;
  state.x_prev = {0.5, 0.5};
  state.x_hat = {0.5, 0.5};
  state.f_prev = {1.0, 0.0};
  state.a_prev = {1.0, 1.0};
  const OgdStep step = ogd_iterate(problem, 0.1, state);
  // proj((0.4, 0.5)) distributes the deficit evenly.
  EXPECT_NEAR(step.x[0], 0.45, 1e-15);
  EXPECT_NEAR(step.x[1], 0.55, 1e-15);
}

TEST(OgdIterate, ConstantWeightEqualsRescaledStep) {
  auto problem = pennies_problem();
  const double c = 3.7;
  WeightedVIProblem weighted = problem;
  weighted.eval_A = [](const Vec& x) { return Vec(x.size(), 3.7); };
  weighted.ell = c;
  weighted.h = c;

  SolverConfig coarse;
  coarse.eta = 0.05;
  coarse.iterations = 60;
  SolverConfig fine = coarse;
  fine.eta = 0.05 * c;

  const SolveReport a = solve(weighted, coarse);
  const SolveReport b = solve(problem, fine);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    for (std::size_t i = 0; i < a.records[k].x.size(); ++i) {
      EXPECT_NEAR(a.records[k].x[i], b.records[k].x[i], 1e-12);
    }
  }
}

TEST(StepSize, TheoremFormula) {
  EXPECT_NEAR(theorem_step_size(1, 1, 1, 1, 1, 1), 0.25 / std::sqrt(2.0),
              1e-15);
  // With alpha = 0 the formula reduces to (1/4) sqrt(ell) / L.
  const double base = theorem_step_size(1.0, 1.0, 1.0, 1.0, 0.0, 1.0);
  const double doubled = theorem_step_size(1.0, 1.0, 2.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(base, 0.25, 1e-15);
  EXPECT_NEAR(doubled, 0.5 * base, 1e-15);
  EXPECT_NEAR(theorem_step_size(0.25, 4, 1, 1, 1, 1),
              0.01515847656477081, 1e-12);
  EXPECT_THROW(theorem_step_size(0, 1, 1, 1, 1, 1), InvalidInputError);
}

TEST(IterationBudget, Formula) {
  EXPECT_EQ(iteration_budget(2, 1, 1, 1), 4);
  EXPECT_EQ(iteration_budget(2, 1, 1, 0.5), 16);  // halving eps quadruples
  EXPECT_EQ(iteration_budget(12, 4, 0.25, 0.1), 38400);
  EXPECT_THROW(iteration_budget(2, 1, 1, 0), InvalidInputError);
}

TEST(SlackBudget, Formula) {
  // gamma = 0 reduces to the inverted iteration budget.
  EXPECT_NEAR(slack_budget(0.0, 0.1, 1.0, 1.0, 2.0, 16),
              std::sqrt(2.0 * 2.0 / 16.0), 1e-15);
  // T -> infinity leaves the slack term.
  EXPECT_NEAR(slack_budget(0.01, 0.1, 0.25, 4.0, 12.0, 4000000000LL),
              std::sqrt(4.0 * 0.1 * 0.01 / 0.25), 1e-6);
  EXPECT_NEAR(slack_budget(0.01, 0.1, 0.25, 4.0, 12.0, 10000),
              0.2332380757938, 1e-9);
}

TEST(ViGap, ClosedForm) {
  BlockSpace space({2});
  EXPECT_EQ(vi_gap(space, {0.5, 0.5}, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(vi_gap(space, {1.0, 0.0}, {1.0, 0.0}), 1.0, 1e-15);
  EXPECT_EQ(vi_gap(space, {0.5, 0.5}, {3.25, 3.25}), 0.0);
}

TEST(ViGap, ZeroIffBlockwiseVertexOptimal) {
  SplitMix64 rng(3);
  BlockSpace space({3, 2});
  for (int trial = 0; trial < 100; ++trial) {
    Vec x = project_blockwise(space, [&] {
      Vec v(5);
      for (auto& c : v) c = rng.next_uniform(-1.0, 1.0);
      return v;
    }());
    Vec f(5);
    for (auto& c : f) c = rng.next_uniform(-1.0, 1.0);
    const double gap = vi_gap(space, x, f);

    // Enumerated vertex minimum per block.
    bool optimal = true;
    for (int r = 0; r < space.block_count(); ++r) {
      const auto z = space.block(x, r);
      const auto fr = space.block(f, r);
      double inner = 0.0, lo = fr[0];
      for (std::size_t i = 0; i < z.size(); ++i) {
        inner += z[i] * fr[i];
        lo = std::min(lo, fr[i]);
      }
      if (inner > lo + 1e-12) optimal = false;
    }
    EXPECT_EQ(gap <= 1e-12, optimal);
  }
  // Constructed zero-gap point: mass on the minimizing coordinates.
  const Vec f{2.0, -1.0, 5.0, 0.25, 0.75};
  const Vec x{0.0, 1.0, 0.0, 1.0, 0.0};
  EXPECT_NEAR(vi_gap(space, x, f), 0.0, 1e-15);
}

TEST(Solve, ZeroOperatorStaysAtInitial) {
  BlockSpace space({2, 3});
  auto problem = WeightedVIProblem::vanilla(
      space, [](const Vec& x) { return Vec(x.size(), 0.0); });
  SolverConfig config;
  config.eta = 0.2;
  config.iterations = 25;
  const SolveReport report = solve(problem, config);
  for (const auto& rec : report.records) {
    EXPECT_EQ(rec.x, space.centroid());
    EXPECT_EQ(rec.eqgap, 0.0);
  }
  EXPECT_EQ(report.best.t, 1);  // ties break toward the earliest iterate
  EXPECT_EQ(report.best.eqgap, 0.0);
  EXPECT_EQ(report.path_length_sum, 0.0);
}

TEST(Solve, MatchesReferenceImplementation) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 600;
  config.initial = Vec{0.9, 0.1, 0.2, 0.8};
  const SolveReport report = solve(problem, config);
  const auto reference = reference_ogd(problem.space, problem.eval_F, 0.1,
                                       600, {0.9, 0.1, 0.2, 0.8});
  ASSERT_EQ(report.records.size(), reference.size() + 1);
  for (long long t = 1; t <= 600; ++t) {
    const auto& rec = report.records[static_cast<std::size_t>(t)];
    ASSERT_EQ(rec.t, t);
    for (std::size_t i = 0; i < rec.x.size(); ++i) {
      EXPECT_NEAR(rec.x[i], reference[static_cast<std::size_t>(t - 1)][i],
                  1e-12);
    }
  }
  // The saddle dynamics converge on the monotone instance.
  EXPECT_LT(report.best.eqgap, report.records[0].eqgap);
  EXPECT_LT(report.best.eqgap, 0.05);
}

TEST(Solve, DeterministicAndFeasible) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.07;
  config.iterations = 90;
  const SolveReport a = solve(problem, config);
  const SolveReport b = solve(problem, config);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].x, b.records[k].x);  // bitwise identical
    EXPECT_EQ(a.records[k].eqgap, b.records[k].eqgap);
    EXPECT_TRUE(is_feasible(problem.space, a.records[k].x));
    EXPECT_TRUE(is_feasible(problem.space, a.records[k].x_hat));
  }
  EXPECT_EQ(a.path_length_sum, b.path_length_sum);
}

TEST(Solve, PathLengthGrowsWithHorizon) {
  auto problem = pennies_problem();
  SolverConfig short_run;
  short_run.eta = 0.1;
  short_run.iterations = 40;
  SolverConfig long_run = short_run;
  long_run.iterations = 160;
  const double sum_short = solve(problem, short_run).path_length_sum;
  const double sum_long = solve(problem, long_run).path_length_sum;
  EXPECT_GE(sum_long, sum_short);
  EXPECT_GE(sum_short, 0.0);
}

TEST(Solve, BestIterateAlwaysRecorded) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 100;
  config.record_every = 33;
  const SolveReport report = solve(problem, config);
  bool found = false;
  for (const auto& rec : report.records) {
    if (rec.t == report.best.t) {
      found = true;
      EXPECT_EQ(rec.eqgap, report.best.eqgap);
    }
    if (rec.t > 0 && rec.t != report.best.t && rec.t % 33 != 0) {
      EXPECT_EQ(rec.t, config.iterations);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Solve, OperatorFailureCarriesPartialReport) {
  BlockSpace space({2});
  int calls = 0;
  auto problem = WeightedVIProblem::vanilla(space, [&calls](const Vec& x) {
    ++calls;
    if (calls > 5) return Vec{std::nan(""), 0.0};
    return Vec{0.1, -0.1};
  });
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 50;
  try {
    solve(problem, config);
    FAIL() << "expected SolveAbortedError";
  } catch (const SolveAbortedError& e) {
    ASSERT_NE(e.partial, nullptr);
    EXPECT_TRUE(e.partial->aborted);
    EXPECT_EQ(e.partial->iterations_completed, 4);
    EXPECT_FALSE(e.partial->records.empty());
  }
}

TEST(RvuAudit, ZeroOperator) {
  BlockSpace space({2});
  auto problem = WeightedVIProblem::vanilla(
      space, [](const Vec& x) { return Vec(x.size(), 0.0); });
  SolverConfig config;
  config.eta = 0.25;
  config.iterations = 10;
  const SolveReport report = solve(problem, config);
  const auto rows = rvu_audit(report, space, 0, config.eta);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.lhs, 0.0, 1e-15);
    EXPECT_NEAR(row.rhs, 2.0 / (2.0 * 0.25), 1e-12);
  }
}

TEST(RvuAudit, ConstantUtilityHolds) {
  BlockSpace space({3});
  auto problem = WeightedVIProblem::vanilla(
      space, [](const Vec&) { return Vec{0.4, -0.2, 0.1}; });
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 200;
  const SolveReport report = solve(problem, config);
  for (const auto& row : rvu_audit(report, space, 0, config.eta)) {
    EXPECT_LE(row.lhs, row.rhs + 1e-9);
  }
}

TEST(RvuAudit, HoldsOnSaddleRunAndMatchesStreamingLedger) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 250;
  const SolveReport report = solve(problem, config);
  for (int r = 0; r < problem.space.block_count(); ++r) {
    const auto rows = rvu_audit(report, problem.space, r, config.eta);
    const auto& ledger = report.block_audits[static_cast<std::size_t>(r)];
    ASSERT_EQ(rows.size(), ledger.rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      EXPECT_LE(rows[k].lhs, rows[k].rhs + 1e-9);
      EXPECT_EQ(rows[k].t, ledger.rows[k].t);
      EXPECT_NEAR(rows[k].lhs, ledger.rows[k].lhs, 1e-9);
      EXPECT_NEAR(rows[k].rhs, ledger.rows[k].rhs, 1e-9);
    }
    EXPECT_GE(ledger.rvu_min_slack, -1e-9);
  }
}

TEST(RvuAudit, RejectsSparseReports) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 50;
  config.record_every = 5;
  const SolveReport report = solve(problem, config);
  EXPECT_THROW(rvu_audit(report, problem.space, 0, config.eta),
               InsufficientRecordsError);
}

TEST(BrGapBound, DominatesInstantaneousGap) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 250;
  const SolveReport report = solve(problem, config);
  Vec max_norms(2);
  for (int r = 0; r < 2; ++r) {
    max_norms[static_cast<std::size_t>(r)] =
        report.block_audits[static_cast<std::size_t>(r)].max_utility_norm;
  }
  for (const auto& rec : report.records) {
    if (rec.t == 0) continue;
    const Vec bounds = br_gap_bound(rec, problem.space, config.eta, max_norms);
    for (int r = 0; r < 2; ++r) {
      const double gap = instantaneous_block_gap(rec, problem.space, r);
      EXPECT_LE(gap, bounds[static_cast<std::size_t>(r)] + 1e-9);
    }
  }
  for (const auto& ledger : report.block_audits) {
    EXPECT_GE(ledger.br_min_slack, -1e-9);
  }
}

TEST(BrGapBound, ScalesLinearlyInS) {
  BlockSpace space({2});
  IterateRecord rec;
  rec.s_blocks = {0.3};
  Vec norms{2.0};
  const double one = br_gap_bound(rec, space, 0.1, norms)[0];
  rec.s_blocks = {0.6};
  const double two = br_gap_bound(rec, space, 0.1, norms)[0];
  EXPECT_NEAR(two, 2.0 * one, 1e-12);
  rec.s_blocks = {0.0};
  EXPECT_EQ(br_gap_bound(rec, space, 0.1, norms)[0], 0.0);
}

TEST(NoisyWrap, DeltaZeroIsIdentity) {
  auto problem = pennies_problem();
  auto wrapped = noisy_wrap(
      problem, 0.0, [](const Vec&) { return 1.0; }, 42);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x = project_blockwise(problem.space, [&] {
      Vec v(4);
      for (auto& c : v) c = rng.next_uniform(-1.0, 1.0);
      return v;
    }());
    const Vec f0 = problem.eval_F(x);
    const Vec f1 = wrapped.eval_F(x);
    for (std::size_t i = 0; i < f0.size(); ++i) {
      EXPECT_NEAR(f0[i], f1[i], 1e-15);
    }
  }
}

TEST(NoisyWrap, PerturbationNormEqualsDeltaTimesGap) {
  auto problem = pennies_problem();
  auto gap_oracle = [&problem](const Vec& x) {
    return vi_gap(problem.space, x, problem.eval_F(x));
  };
  auto wrapped = noisy_wrap(problem, 0.05, gap_oracle, 7);
  SplitMix64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x = project_blockwise(problem.space, [&] {
      Vec v(4);
      for (auto& c : v) c = rng.next_uniform(-1.0, 1.0);
      return v;
    }());
    const Vec f0 = problem.eval_F(x);
    const Vec f1 = wrapped.eval_F(x);
    const double diff = std::sqrt(squared_distance(f0, f1));
    EXPECT_NEAR(diff, 0.05 * gap_oracle(x), 1e-12);
  }
  // Zero gap means zero perturbation.
  auto null_wrapped = noisy_wrap(
      problem, 0.05, [](const Vec&) { return 0.0; }, 7);
  const Vec x = problem.space.centroid();
  const Vec f0 = problem.eval_F(x);
  const Vec f1 = null_wrapped.eval_F(x);
  for (std::size_t i = 0; i < f0.size(); ++i) EXPECT_EQ(f0[i], f1[i]);
  EXPECT_THROW(noisy_wrap(problem, -0.1, nullptr, 0), InvalidInputError);
}

TEST(PathLengthAudit, BoundAndFlag) {
  auto problem = pennies_problem();
  SolverConfig config;
  config.eta = 0.1;
  config.iterations = 150;
  const SolveReport report = solve(problem, config);
  const auto audit =
      path_length_audit(report, problem.space.diameter_squared(), 1.0, 1.0);
  EXPECT_EQ(audit.sum, report.path_length_sum);
  EXPECT_NEAR(audit.bound, 2.0 * 4.0, 1e-12);
  EXPECT_EQ(audit.holds, audit.sum <= audit.bound);
}

}  // namespace
}  // namespace mintygym
