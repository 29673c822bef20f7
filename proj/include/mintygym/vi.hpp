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
// Weighted optimistic gradient descent over a product of simplices.
//
// The update kept by the solver is
//
//   x(t)     = proj( xhat(t) - eta * A(x(t-1)) o F(x(t-1)) )
//   xhat(t+1)= proj( xhat(t) - eta * A(x(t))   o F(x(t))   )
//
// with x(0) = xhat(1) equal to the initial point, and the auxiliary
// evaluation at t = 0 taken at the initial point. A is a block-constant
// weight map bounded in [ell, h]; A == 1 recovers plain optimistic gradient
// descent. Regret-style audits measure utilities u = -A o F, i.e. regret for
// maximization.

#ifndef MINTYGYM_VI_HPP_
#define MINTYGYM_VI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "mintygym/block_space.hpp"
#include "mintygym/common.hpp"
#include "mintygym/random.hpp"

namespace mintygym {

struct WeightedVIProblem {
  BlockSpace space;
  // Operator F: X -> R^total_dim.
  std::function<Vec(const Vec&)> eval_F;
  // Weight map A: block-constant, entries in [ell, h]. Empty means A == 1.
  std::function<Vec(const Vec&)> eval_A;
  // Shared bounds for the entries of A (and of the analysis-only map W,
  // which the solver never evaluates).
  double ell = 1.0;
  double h = 1.0;
  // Lipschitz constant of each block weight a_r.
  double lipschitz_A = 0.0;
  // Optional uniform bound on per-block operator norms max_r ||F_r(x)||_2;
  // checked against every evaluation when present.
  std::optional<double> operator_block_bound;

  static WeightedVIProblem vanilla(BlockSpace space,
                                   std::function<Vec(const Vec&)> f) {
    WeightedVIProblem p;
    p.space = std::move(space);
    p.eval_F = std::move(f);
    return p;
  }

  WeightedVIProblem() : space(std::vector<int>{1}) {}
};

struct NoiseModel {
  double delta = 0.0;      // relative perturbation level
  double rho_noise = 0.0;  // slack coefficient of the noisy Minty condition
};

struct SolverConfig {
  double eta = 0.1;
  long long iterations = 1;
  std::optional<Vec> initial;  // default: block-wise centroid
  long long record_every = 1;
  std::uint64_t seed = 0;
  std::optional<NoiseModel> noise;  // echoed into the report
  double slack_gamma = 0.0;         // reporting only
};

struct IterateRecord {
  long long t = 0;
  Vec x;       // x(t)
  Vec x_hat;   // xhat(t)
  double eqgap = 0.0;
  Vec s_blocks;   // per block: ||z - zhat(t)|| + ||z - zhat(t+1)||
  Vec s2_blocks;  // per block: ||z - zhat(t)||^2 + ||z - zhat(t+1)||^2
  Vec utility;    // u(t) = -A(x(t)) o F(x(t))
};

struct RvuLedgerRow {
  long long t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Streaming per-block audit state; the inequality trackers cover every
// iteration even when records are sparse.
struct BlockAuditLedger {
  std::vector<RvuLedgerRow> rows;  // sampled at the record cadence
  double rvu_min_slack = std::numeric_limits<double>::infinity();
  long long rvu_min_slack_t = 0;
  double br_min_slack = std::numeric_limits<double>::infinity();
  long long br_min_slack_t = 0;
  double max_utility_norm = 0.0;  // max over t >= 1 of ||u_r(t)||_2
};

struct BestIterate {
  long long t = 0;
  Vec x;
  double eqgap = std::numeric_limits<double>::infinity();
};

struct SolveReport {
  std::vector<IterateRecord> records;  // includes a t = 0 row
  BestIterate best;
  double path_length_sum = 0.0;
  SolverConfig config;
  std::vector<BlockAuditLedger> block_audits;
  double max_block_operator_norm = 0.0;
  bool operator_bound_violated = false;
  long long iterations_completed = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Thrown out of solve() on operator failure; carries what completed so far.
struct SolveAbortedError : std::runtime_error {
  SolveAbortedError(const std::string& what, std::shared_ptr<SolveReport> r)
      : std::runtime_error(what), partial(std::move(r)) {}
  std::shared_ptr<SolveReport> partial;
};

// Strong (Stampacchia) gap max over x* of <x - x*, F(x)>. Decomposes over
// simplex blocks: sum_r ( <z_r, F_r> - min_a F_r[a] ).
inline double vi_gap(const BlockSpace& space, const Vec& x, const Vec& fx) {
  require(space.matches(x) && space.matches(fx), "vi_gap: dimension mismatch");
  double gap = 0.0;
  for (int r = 0; r < space.block_count(); ++r) {
    const auto z = space.block(x, r);
    const auto f = space.block(fx, r);
    double inner = 0.0;
    double lo = f[0];
    for (std::size_t a = 0; a < z.size(); ++a) {
      inner += z[a] * f[a];
      lo = std::min(lo, f[a]);
    }
    gap += std::max(inner - lo, 0.0);
  }
  return gap;
}

// Learning rate of the convergence guarantee:
// eta = (1/4) sqrt( ell / (h^3 L^2 + h B_F^2 alpha^2 d) ).
inline double theorem_step_size(double ell, double h, double lipschitz_F,
                                double b_f, double alpha, double d) {
  require(ell > 0 && h > 0 && lipschitz_F > 0 && b_f > 0 && alpha >= 0 &&
              d > 0,
          "theorem_step_size: arguments must be positive");
  const double denom =
      h * h * h * lipschitz_F * lipschitz_F + h * b_f * b_f * alpha * alpha * d;
  return 0.25 * std::sqrt(ell / denom);
}

// Iteration budget T >= 2 D_X^2 h / (ell eps^2), rounded up.
inline long long iteration_budget(double diameter_squared, double h,
                                  double ell, double eps) {
  require(diameter_squared > 0 && h > 0 && ell > 0 && eps > 0,
          "iteration_budget: arguments must be positive");
  return static_cast<long long>(
      std::ceil(2.0 * diameter_squared * h / (ell * eps * eps)));
}

// Iterate-distance level sqrt(4 eta gamma / ell + 2 D_X^2 h / (ell T)) under
// the slack-gamma relaxation of the Minty condition.
inline double slack_budget(double gamma, double eta, double ell, double h,
                           double diameter_squared, long long iterations) {
  require(gamma >= 0 && eta > 0 && ell > 0 && h > 0 && diameter_squared > 0 &&
              iterations >= 1,
          "slack_budget: invalid arguments");
  return std::sqrt(4.0 * eta * gamma / ell +
                   2.0 * diameter_squared * h /
                       (ell * static_cast<double>(iterations)));
}

// Best-iterate gap guarantee 2 d (max_r D_r / (eta ell) + h B_F / ell) * eps.
inline double theorem_gap_bound(double d, double max_block_diameter,
                                double eta, double ell, double h, double b_f,
                                double eps) {
  return 2.0 * d * (max_block_diameter / (eta * ell) + h * b_f / ell) * eps;
}

namespace detail {

inline Vec ones_like(const BlockSpace& space) {
  return Vec(static_cast<std::size_t>(space.total_dim()), 1.0);
}

// Evaluates (F, A) at x and enforces the problem contract: finite values,
// block-constant A within [ell, h].
inline std::pair<Vec, Vec> evaluate_operator(const WeightedVIProblem& p,
                                             const Vec& x) {
  Vec f = p.eval_F(x);
  if (!p.space.matches(f)) {
    throw InvalidInputError("operator F returned a wrong-sized vector");
  }
  if (!all_finite(f)) {
    throw OperatorFailureError("operator F returned a non-finite value", x);
  }
  Vec a = p.eval_A ? p.eval_A(x) : ones_like(p.space);
  if (!p.space.matches(a)) {
    throw InvalidInputError("weight map A returned a wrong-sized vector");
  }
  if (!all_finite(a)) {
    throw OperatorFailureError("weight map A returned a non-finite value", x);
  }
  const double tol = 1e-9 * std::max(1.0, p.h);
  for (int r = 0; r < p.space.block_count(); ++r) {
    const auto blk = p.space.block(a, r);
    for (double v : blk) {
      if (v != blk[0]) {
        throw InvalidInputError("weight map A is not block-constant");
      }
    }
    if (blk[0] < p.ell - tol || blk[0] > p.h + tol) {
      throw InvalidInputError("weight map A violates its [ell, h] bounds");
    }
  }
  return {std::move(f), std::move(a)};
}

}  // namespace detail

struct OgdState {
  Vec x_prev;  // x(t-1)
  Vec x_hat;   // xhat(t)
  Vec f_prev;  // F(x(t-1))
  Vec a_prev;  // A(x(t-1))
};

struct OgdStep {
  Vec x;         // x(t)
  Vec x_hat_next;  // xhat(t+1)
  Vec f;         // F(x(t))
  Vec a;         // A(x(t))
};

// One optimistic step. The supplied evaluations must be those taken at
// state.x_prev; the returned ones are taken at the new iterate.
inline OgdStep ogd_iterate(const WeightedVIProblem& problem, double eta,
                           const OgdState& state) {
  const BlockSpace& space = problem.space;
  require(space.matches(state.x_hat) && space.matches(state.f_prev) &&
              space.matches(state.a_prev),
          "ogd_iterate: state dimension mismatch");
  Vec shifted(state.x_hat);
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    shifted[i] -= eta * state.a_prev[i] * state.f_prev[i];
  }
  OgdStep step;
  step.x = project_blockwise(space, shifted);
  auto [f, a] = detail::evaluate_operator(problem, step.x);
  step.f = std::move(f);
  step.a = std::move(a);
  Vec shifted_hat(state.x_hat);
  for (std::size_t i = 0; i < shifted_hat.size(); ++i) {
    shifted_hat[i] -= eta * step.a[i] * step.f[i];
  }
  step.x_hat_next = project_blockwise(space, shifted_hat);
  return step;
}

// Runs T iterations and assembles the trajectory report. Deterministic given
// (problem, config). `on_record` fires for every appended record, including
// the t = 0 row, in iteration order; `on_iterate` fires for every iteration
// regardless of the record cadence (streaming consumers, e.g. time
// mixtures).
inline SolveReport solve(
    const WeightedVIProblem& problem, const SolverConfig& config,
    const std::function<void(const IterateRecord&)>& on_record = nullptr,
    const std::function<void(const IterateRecord&)>& on_iterate = nullptr) {
  require(config.eta > 0, "solve: eta must be positive");
  require(config.iterations >= 1, "solve: need at least one iteration");
  require(config.record_every >= 1, "solve: record cadence must be >= 1");
  const BlockSpace& space = problem.space;
  const int d = space.block_count();

  Vec initial = config.initial ? *config.initial : space.centroid();
  require_feasible(space, initial, "solve: initial point");

  auto report = std::make_shared<SolveReport>();
  report->config = config;
  report->block_audits.resize(static_cast<std::size_t>(d));

  const double eta = config.eta;
  const double inv_two_eta = 1.0 / (2.0 * eta);

  // Streaming RVU accumulators per block.
  std::vector<Vec> cum_utility(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) {
    cum_utility[static_cast<std::size_t>(r)]
        .resize(static_cast<std::size_t>(space.block_dim(r)), 0.0);
  }
  Vec cum_played(static_cast<std::size_t>(d), 0.0);     // sum <z_r, u_r>
  Vec cum_variation(static_cast<std::size_t>(d), 0.0);  // sum ||u - u_prev||^2
  Vec cum_prox(static_cast<std::size_t>(d), 0.0);       // sum s2 terms

  auto utility_of = [&](const Vec& f, const Vec& a) {
    Vec u(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) u[i] = -a[i] * f[i];
    return u;
  };

  OgdState state;
  state.x_prev = initial;
  state.x_hat = initial;
  try {
    auto [f0, a0] = detail::evaluate_operator(problem, initial);
    state.f_prev = std::move(f0);
    state.a_prev = std::move(a0);
  } catch (const OperatorFailureError& e) {
    report->aborted = true;
    report->abort_reason = e.what();
    throw SolveAbortedError(e.what(), report);
  }
  Vec utility_prev = utility_of(state.f_prev, state.a_prev);

  // t = 0 row: the initial point with its auxiliary utility.
  {
    IterateRecord rec;
    rec.t = 0;
    rec.x = initial;
    rec.x_hat = initial;
    rec.eqgap = vi_gap(space, initial, state.f_prev);
    rec.s_blocks.assign(static_cast<std::size_t>(d), 0.0);
    rec.s2_blocks.assign(static_cast<std::size_t>(d), 0.0);
    rec.utility = utility_prev;
    if (on_record) on_record(rec);
    report->records.push_back(std::move(rec));
  }

  IterateRecord best_record;
  bool best_recorded_at_cadence = false;

  for (long long t = 1; t <= config.iterations; ++t) {
    OgdStep step;
    try {
      step = ogd_iterate(problem, eta, state);
    } catch (const OperatorFailureError& e) {
      report->aborted = true;
      report->abort_reason = e.what();
      report->iterations_completed = t - 1;
      throw SolveAbortedError(e.what(), report);
    }

    IterateRecord rec;
    rec.t = t;
    rec.x = step.x;
    rec.x_hat = state.x_hat;
    rec.eqgap = vi_gap(space, step.x, step.f);
    rec.utility = utility_of(step.f, step.a);
    rec.s_blocks.resize(static_cast<std::size_t>(d));
    rec.s2_blocks.resize(static_cast<std::size_t>(d));

    double path_term = 0.0;
    for (int r = 0; r < d; ++r) {
      const auto z = space.block(step.x, r);
      const auto zh = space.block(state.x_hat, r);
      const auto zh_next = space.block(step.x_hat_next, r);
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double a1 = z[i] - zh[i];
        const double a2 = z[i] - zh_next[i];
        d1 += a1 * a1;
        d2 += a2 * a2;
      }
      rec.s_blocks[static_cast<std::size_t>(r)] =
          std::sqrt(d1) + std::sqrt(d2);
      rec.s2_blocks[static_cast<std::size_t>(r)] = d1 + d2;
      path_term += d1 + d2;
    }
    report->path_length_sum += path_term;

    // Per-block audits, maintained at every iteration.
    const bool at_cadence = (t % config.record_every == 0);
    for (int r = 0; r < d; ++r) {
      auto& ledger = report->block_audits[static_cast<std::size_t>(r)];
      const auto u = space.block(rec.utility, r);
      const auto u_prev = space.block(utility_prev, r);
      const auto z = space.block(step.x, r);
      auto& cum_u = cum_utility[static_cast<std::size_t>(r)];
      double played = 0.0, variation = 0.0, u_norm_sq = 0.0;
      double u_max = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < u.size(); ++i) {
        cum_u[i] += u[i];
        played += z[i] * u[i];
        const double du = u[i] - u_prev[i];
        variation += du * du;
        u_norm_sq += u[i] * u[i];
        u_max = std::max(u_max, u[i]);
      }
      cum_played[static_cast<std::size_t>(r)] += played;
      cum_variation[static_cast<std::size_t>(r)] += variation;
      cum_prox[static_cast<std::size_t>(r)] +=
          rec.s2_blocks[static_cast<std::size_t>(r)];
      ledger.max_utility_norm =
          std::max(ledger.max_utility_norm, std::sqrt(u_norm_sq));

      const double lhs = *std::max_element(cum_u.begin(), cum_u.end()) -
                         cum_played[static_cast<std::size_t>(r)];
      const double rhs =
          space.block_diameter(r) * space.block_diameter(r) * inv_two_eta +
          eta * cum_variation[static_cast<std::size_t>(r)] -
          inv_two_eta * cum_prox[static_cast<std::size_t>(r)];
      const double slack = rhs - lhs;
      if (slack < ledger.rvu_min_slack) {
        ledger.rvu_min_slack = slack;
        ledger.rvu_min_slack_t = t;
      }
      if (at_cadence || t == config.iterations) {
        ledger.rows.push_back({t, lhs, rhs});
      }

      // Instantaneous best-response gap against its bound.
      const double inst_gap = u_max - played;
      const double bound = (space.block_diameter(r) / eta +
                            ledger.max_utility_norm) *
                           rec.s_blocks[static_cast<std::size_t>(r)];
      const double br_slack = bound - inst_gap;
      if (br_slack < ledger.br_min_slack) {
        ledger.br_min_slack = br_slack;
        ledger.br_min_slack_t = t;
      }
    }

    // Track per-block operator norms against the declared bound.
    for (int r = 0; r < d; ++r) {
      const auto f = space.block(step.f, r);
      double nsq = 0.0;
      for (double v : f) nsq += v * v;
      const double n = std::sqrt(nsq);
      report->max_block_operator_norm =
          std::max(report->max_block_operator_norm, n);
      if (problem.operator_block_bound &&
          n > *problem.operator_block_bound * (1.0 + 1e-9)) {
        report->operator_bound_violated = true;
      }
    }

    if (on_iterate) on_iterate(rec);

    const bool is_new_best = rec.eqgap < best_record.eqgap ||
                             best_record.x.empty();
    if (is_new_best) {
      best_record = rec;
      best_recorded_at_cadence = at_cadence || t == config.iterations;
    }
    if (at_cadence || t == config.iterations) {
      if (on_record) on_record(rec);
      report->records.push_back(rec);
    }

    state.x_prev = std::move(step.x);
    state.x_hat = std::move(step.x_hat_next);
    state.f_prev = std::move(step.f);
    state.a_prev = std::move(step.a);
    utility_prev = rec.utility;
    report->iterations_completed = t;
  }

  // The best iterate is always present among the records.
  if (!best_recorded_at_cadence) {
    auto pos = std::lower_bound(
        report->records.begin(), report->records.end(), best_record.t,
        [](const IterateRecord& r, long long t) { return r.t < t; });
    report->records.insert(pos, best_record);
  }
  report->best.t = best_record.t;
  report->best.x = best_record.x;
  report->best.eqgap = best_record.eqgap;
  return *report;
}

struct PathLengthAudit {
  double sum = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// Second-order path length against its bound 2 D_X^2 h / ell.
inline PathLengthAudit path_length_audit(const SolveReport& report,
                                         double diameter_squared, double h,
                                         double ell) {
  PathLengthAudit audit;
  audit.sum = report.path_length_sum;
  audit.bound = 2.0 * diameter_squared * h / ell;
  audit.holds = audit.sum <= audit.bound;
  return audit;
}

// Recomputes the per-t regret inequality for block r from a fully recorded
// trajectory. Requires record_every == 1.
inline std::vector<RvuLedgerRow> rvu_audit(const SolveReport& report,
                                           const BlockSpace& space, int r,
                                           double eta) {
  if (report.config.record_every != 1) {
    throw InsufficientRecordsError(
        "rvu_audit: report was recorded at a cadence coarser than 1");
  }
  require(r >= 0 && r < space.block_count(), "rvu_audit: block out of range");
  const double diam_sq = space.block_diameter(r) * space.block_diameter(r);
  std::vector<RvuLedgerRow> rows;
  Vec cum_u(static_cast<std::size_t>(space.block_dim(r)), 0.0);
  double cum_played = 0.0, cum_variation = 0.0, cum_prox = 0.0;
  const IterateRecord* prev = nullptr;
  for (const auto& rec : report.records) {
    if (rec.t == 0) {
      prev = &rec;
      continue;
    }
    require(prev != nullptr && rec.t == prev->t + 1,
            "rvu_audit: records are not contiguous");
    const auto u = space.block(rec.utility, r);
    const auto u_prev = space.block(prev->utility, r);
    const auto z = space.block(rec.x, r);
    for (std::size_t i = 0; i < u.size(); ++i) {
      cum_u[i] += u[i];
      cum_played += z[i] * u[i];
      const double du = u[i] - u_prev[i];
      cum_variation += du * du;
    }
    cum_prox += rec.s2_blocks[static_cast<std::size_t>(r)];
    const double lhs =
        *std::max_element(cum_u.begin(), cum_u.end()) - cum_played;
    const double rhs = diam_sq / (2.0 * eta) + eta * cum_variation -
                       cum_prox / (2.0 * eta);
    rows.push_back({rec.t, lhs, rhs});
    prev = &rec;
  }
  return rows;
}

// Bound (D_r / eta + max_u_norm) * s_r on the instantaneous per-block gap.
inline Vec br_gap_bound(const IterateRecord& record, const BlockSpace& space,
                        double eta, const Vec& max_utility_norms) {
  require(max_utility_norms.size() == record.s_blocks.size(),
          "br_gap_bound: per-block norm vector has wrong size");
  Vec bounds(record.s_blocks.size());
  for (int r = 0; r < space.block_count(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    bounds[i] = (space.block_diameter(r) / eta + max_utility_norms[i]) *
                record.s_blocks[i];
  }
  return bounds;
}

// max over z* in the simplex of <z* - z_r, u_r> at a recorded iterate.
inline double instantaneous_block_gap(const IterateRecord& record,
                                      const BlockSpace& space, int r) {
  const auto u = space.block(record.utility, r);
  const auto z = space.block(record.x, r);
  double best = u[0], played = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    best = std::max(best, u[i]);
    played += z[i] * u[i];
  }
  return best - played;
}

// Wraps F with a relative perturbation delta * EqGap(x) * (random unit
// vector), so that ||F' - F||_2 = delta * EqGap(x) exactly. The direction is
// drawn fresh from the seeded generator at every evaluation.
inline WeightedVIProblem noisy_wrap(
    const WeightedVIProblem& problem, double delta,
    std::function<double(const Vec&)> gap_oracle, std::uint64_t seed) {
  require(delta >= 0, "noisy_wrap: delta must be nonnegative");
  WeightedVIProblem wrapped = problem;
  if (delta == 0.0) return wrapped;
  wrapped.operator_block_bound.reset();
  struct RngBox {
    std::mutex mu;
    SplitMix64 rng;
    explicit RngBox(std::uint64_t s) : rng(s) {}
  };
  auto box = std::make_shared<RngBox>(seed);
  auto base = problem.eval_F;
  const int dim = problem.space.total_dim();
  wrapped.eval_F = [base, gap_oracle = std::move(gap_oracle), delta, box,
                    dim](const Vec& x) {
    Vec f = base(x);
    const double gap = gap_oracle(x);
    Vec direction;
    {
      std::lock_guard<std::mutex> lock(box->mu);
      direction = random_unit_vector(box->rng, dim);
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] += delta * gap * direction[i];
    }
    return f;
  };
  return wrapped;
}

}  // namespace mintygym

#endif  // MINTYGYM_VI_HPP_
