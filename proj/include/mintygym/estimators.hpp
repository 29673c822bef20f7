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
// Seeded trajectory simulation and Monte Carlo estimation of unnormalized
// state visitation, supplying approximate controller weights.

#ifndef MINTYGYM_ESTIMATORS_HPP_
#define MINTYGYM_ESTIMATORS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "mintygym/common.hpp"
#include "mintygym/markov_game.hpp"
#include "mintygym/parallel.hpp"
#include "mintygym/random.hpp"

namespace mintygym {

// Rollout driver. Substream r of a run is seeded by mixing (seed, r), so an
// estimate is reproducible for any degree of parallelism. The horizon cap
// bounds runaway trajectories; with the default ceil(40 / zeta) the
// truncation probability is below e^-40.
struct RolloutEngine {
  std::shared_ptr<const MarkovGame> game;
  std::uint64_t seed = 0;
  long long max_horizon = 1;

  static RolloutEngine create(std::shared_ptr<const MarkovGame> game,
                              std::uint64_t seed) {
    require(game != nullptr, "RolloutEngine: null game");
    RolloutEngine e;
    e.max_horizon =
        static_cast<long long>(std::ceil(40.0 / game->zeta()));
    e.game = std::move(game);
    e.seed = seed;
    return e;
  }
};

struct TrajectoryStep {
  int state = 0;
  std::vector<int> actions;
  Vec rewards;  // one per player
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool truncated = false;  // hit the horizon cap before terminating
};

// Simulates one episode: the initial state is drawn from rho, actions are
// drawn independently per player, and each step terminates with the
// residual probability 1 - sum_s' P(s'|s,a).
inline Trajectory sample_trajectory(const RolloutEngine& engine,
                                    const PolicyProfile& profile,
                                    std::uint64_t stream = 0) {
  const MarkovGame& game = *engine.game;
  validate_profile(game, profile);
  SplitMix64 rng = SplitMix64::substream(engine.seed, stream);

  Trajectory out;
  std::size_t s = rng.next_categorical(game.rho());
  if (s >= game.rho().size()) s = game.rho().size() - 1;  // rounding guard
  for (long long h = 0; h < engine.max_horizon; ++h) {
    TrajectoryStep step;
    step.state = static_cast<int>(s);
    step.actions.resize(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i) {
      const auto row = profile.row(game, i, static_cast<int>(s));
      double u = rng.next_double();
      int a = game.action_count(i) - 1;
      for (int cand = 0; cand < game.action_count(i); ++cand) {
        if (u < row[static_cast<std::size_t>(cand)]) {
          a = cand;
          break;
        }
        u -= row[static_cast<std::size_t>(cand)];
      }
      step.actions[static_cast<std::size_t>(i)] = a;
    }
    const long long j = game.joint_index(step.actions);
    step.rewards.resize(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i) {
      step.rewards[static_cast<std::size_t>(i)] =
          game.reward(i, static_cast<int>(s), j);
    }
    out.steps.push_back(std::move(step));

    const auto row = game.transition_row(static_cast<int>(s), j);
    double u = rng.next_double();
    bool terminated = true;
    for (int s2 = 0; s2 < game.num_states(); ++s2) {
      if (u < row[static_cast<std::size_t>(s2)]) {
        s = static_cast<std::size_t>(s2);
        terminated = false;
        break;
      }
      u -= row[static_cast<std::size_t>(s2)];
    }
    if (terminated) return out;
  }
  out.truncated = true;
  return out;
}

struct VisitationEstimate {
  Vec d_tilde_hat;  // mean visit counts per state
  long long rollouts_used = 0;
  Vec standard_errors;
};

// Monte Carlo estimate of the unnormalized visitation distribution:
// d_hat[s] = (1/m) sum over rollouts of the visit count of s. Unbiased up to
// the truncation bias <= (1 - zeta)^max_horizon / zeta. Rollouts run in
// parallel over fixed chunks merged in index order, so the estimate matches
// the sequential one bit for bit.
inline VisitationEstimate mc_visitation(const RolloutEngine& engine,
                                        const PolicyProfile& profile,
                                        long long m) {
  require(m >= 1, "mc_visitation: need at least one rollout");
  const MarkovGame& game = *engine.game;
  validate_profile(game, profile);
  const int S = game.num_states();

  constexpr long long kChunk = 1024;
  const long long chunks = (m + kChunk - 1) / kChunk;
  std::vector<Vec> chunk_sum(static_cast<std::size_t>(chunks));
  std::vector<Vec> chunk_sum_sq(static_cast<std::size_t>(chunks));

  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    Vec sum(static_cast<std::size_t>(S), 0.0);
    Vec sum_sq(static_cast<std::size_t>(S), 0.0);
    Vec counts(static_cast<std::size_t>(S));
    const long long lo = static_cast<long long>(c) * kChunk;
    const long long hi = std::min(m, lo + kChunk);
    for (long long r = lo; r < hi; ++r) {
      const Trajectory traj =
          sample_trajectory(engine, profile, static_cast<std::uint64_t>(r));
      std::fill(counts.begin(), counts.end(), 0.0);
      for (const auto& step : traj.steps) {
        counts[static_cast<std::size_t>(step.state)] += 1.0;
      }
      for (int s = 0; s < S; ++s) {
        sum[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s)];
        sum_sq[static_cast<std::size_t>(s)] +=
            counts[static_cast<std::size_t>(s)] *
            counts[static_cast<std::size_t>(s)];
      }
    }
    chunk_sum[c] = std::move(sum);
    chunk_sum_sq[c] = std::move(sum_sq);
  });

  VisitationEstimate est;
  est.rollouts_used = m;
  est.d_tilde_hat.assign(static_cast<std::size_t>(S), 0.0);
  Vec total_sq(static_cast<std::size_t>(S), 0.0);
  for (long long c = 0; c < chunks; ++c) {
    for (int s = 0; s < S; ++s) {
      est.d_tilde_hat[static_cast<std::size_t>(s)] +=
          chunk_sum[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)];
      total_sq[static_cast<std::size_t>(s)] +=
          chunk_sum_sq[static_cast<std::size_t>(c)]
                      [static_cast<std::size_t>(s)];
    }
  }
  est.standard_errors.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    const double mean =
        est.d_tilde_hat[static_cast<std::size_t>(s)] / static_cast<double>(m);
    const double var =
        total_sq[static_cast<std::size_t>(s)] / static_cast<double>(m) -
        mean * mean;
    est.d_tilde_hat[static_cast<std::size_t>(s)] = mean;
    est.standard_errors[static_cast<std::size_t>(s)] =
        std::sqrt(std::max(var, 0.0) / static_cast<double>(m));
  }
  return est;
}

// Approximate controller weights for weighted-estimated operator mode:
// clamp(1 / d_hat[s]) into [zeta, 1 / max_s rho[s]], which keeps the
// (ell, h) contract of the VI problem valid under estimation noise. Each
// evaluation rolls out m_schedule(evaluation) episodes driven by the
// controller's policy alone on a fresh substream. When `audit_errors` is
// supplied, the sup-norm error against the exact planner weights is appended
// per evaluation.
inline EstimatedWeightFn estimated_weight_map(
    const RolloutEngine& engine,
    std::function<long long(long long)> m_schedule,
    std::shared_ptr<std::vector<double>> audit_errors = nullptr) {
  require(engine.game != nullptr, "estimated_weight_map: null game");
  const auto controller = single_controller_of(*engine.game);
  if (!controller) {
    throw UnsupportedStructureError(
        "estimated_weight_map: game has no single controller");
  }
  const int c = *controller;
  auto game = engine.game;
  const double lo = game->zeta();
  const double hi =
      1.0 / *std::max_element(game->rho().begin(), game->rho().end());
  const std::uint64_t seed = engine.seed;
  const long long horizon = engine.max_horizon;

  return [game, c, lo, hi, seed, horizon, m_schedule,
          audit_errors](const Vec& controller_policy, long long evaluation) {
    const long long m = std::max<long long>(1, m_schedule(evaluation));
    const int S = game->num_states();
    const int k = game->action_count(c);

    // Controller-only chain rollout; the other players cannot influence the
    // state sequence in a single-controller game.
    Vec counts(static_cast<std::size_t>(S), 0.0);
    constexpr long long kChunk = 1024;
    const long long chunks = (m + kChunk - 1) / kChunk;
    std::vector<Vec> chunk_counts(static_cast<std::size_t>(chunks));
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t chunk) {
      Vec local(static_cast<std::size_t>(S), 0.0);
      const long long base = static_cast<long long>(chunk) * kChunk;
      const long long hi_r = std::min(m, base + kChunk);
      for (long long r = base; r < hi_r; ++r) {
        SplitMix64 rng = SplitMix64::substream(
            SplitMix64::mix(seed, static_cast<std::uint64_t>(evaluation)),
            static_cast<std::uint64_t>(r));
        std::size_t s = rng.next_categorical(game->rho());
        if (s >= game->rho().size()) s = game->rho().size() - 1;
        for (long long h = 0; h < horizon; ++h) {
          local[s] += 1.0;
          const double* row =
              controller_policy.data() + static_cast<std::size_t>(s) * k;
          double u = rng.next_double();
          int a = k - 1;
          for (int cand = 0; cand < k; ++cand) {
            if (u < row[cand]) {
              a = cand;
              break;
            }
            u -= row[cand];
          }
          const long long rep =
              static_cast<long long>(a) * game->stride(c);
          const auto trow = game->transition_row(static_cast<int>(s), rep);
          double v = rng.next_double();
          bool terminated = true;
          for (int s2 = 0; s2 < S; ++s2) {
            if (v < trow[static_cast<std::size_t>(s2)]) {
              s = static_cast<std::size_t>(s2);
              terminated = false;
              break;
            }
            v -= trow[static_cast<std::size_t>(s2)];
          }
          if (terminated) break;
        }
      }
      chunk_counts[chunk] = std::move(local);
    });
    for (long long chunk = 0; chunk < chunks; ++chunk) {
      for (int s = 0; s < S; ++s) {
        counts[static_cast<std::size_t>(s)] +=
            chunk_counts[static_cast<std::size_t>(chunk)]
                        [static_cast<std::size_t>(s)];
      }
    }

    Vec weights(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
      const double mean =
          counts[static_cast<std::size_t>(s)] / static_cast<double>(m);
      const double raw =
          mean > 0.0 ? 1.0 / mean : std::numeric_limits<double>::infinity();
      weights[static_cast<std::size_t>(s)] =
          std::min(hi, std::max(lo, raw));
    }

    if (audit_errors) {
      const Vec exact =
          detail::controller_visitation(*game, c, controller_policy);
      double err = 0.0;
      for (int s = 0; s < S; ++s) {
        err = std::max(err, std::abs(weights[static_cast<std::size_t>(s)] -
                                     1.0 / exact[static_cast<std::size_t>(s)]));
      }
      audit_errors->push_back(err);
    }
    return weights;
  };
}

}  // namespace mintygym

#endif  // MINTYGYM_ESTIMATORS_HPP_
