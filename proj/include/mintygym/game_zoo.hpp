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
// Example games: ratio games (including the classical instance on which the
// Minty property fails, with a numerical violation search), their
// single-state Markov embeddings, and random single-controller generators.

#ifndef MINTYGYM_GAME_ZOO_HPP_
#define MINTYGYM_GAME_ZOO_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "mintygym/block_space.hpp"
#include "mintygym/common.hpp"
#include "mintygym/markov_game.hpp"
#include "mintygym/parallel.hpp"
#include "mintygym/random.hpp"
#include "mintygym/vi.hpp"

namespace mintygym {

// Von Neumann ratio game with value x1' R x2 / x1' S x2. S holds per-step
// termination probabilities, so its entries must be positive (and at most 1
// for the Markov embedding); the denominator is bounded below by the minimum
// entry of S.
struct RatioGame {
  int rows = 0;
  int cols = 0;
  Vec r_matrix;  // row-major
  Vec s_matrix;
  double zeta_bound = 0.0;

  double r(int a1, int a2) const {
    return r_matrix[static_cast<std::size_t>(a1 * cols + a2)];
  }
  double s(int a1, int a2) const {
    return s_matrix[static_cast<std::size_t>(a1 * cols + a2)];
  }

  static RatioGame create(int rows, int cols, Vec r_matrix, Vec s_matrix) {
    RatioGame game;
    game.rows = rows;
    game.cols = cols;
    require(rows >= 1 && cols >= 1, "RatioGame: need at least one action");
    require(static_cast<int>(r_matrix.size()) == rows * cols &&
                static_cast<int>(s_matrix.size()) == rows * cols,
            "RatioGame: matrix sizes must match the action counts");
    for (double v : r_matrix) {
      require(std::isfinite(v) && v >= -1.0 && v <= 1.0,
              "RatioGame: R entries must lie in [-1, 1]");
    }
    double lo = 2.0;
    for (double v : s_matrix) {
      require(std::isfinite(v) && v > 0.0 && v <= 1.0,
              "RatioGame: S entries must lie in (0, 1]");
      lo = std::min(lo, v);
    }
    game.r_matrix = std::move(r_matrix);
    game.s_matrix = std::move(s_matrix);
    game.zeta_bound = lo;
    return game;
  }
};

inline double ratio_value(const RatioGame& game, const Vec& x1,
                          const Vec& x2) {
  require(static_cast<int>(x1.size()) == game.rows &&
              static_cast<int>(x2.size()) == game.cols,
          "ratio_value: strategy sizes do not match the game");
  double num = 0.0, den = 0.0;
  for (int a1 = 0; a1 < game.rows; ++a1) {
    double r_row = 0.0, s_row = 0.0;
    for (int a2 = 0; a2 < game.cols; ++a2) {
      r_row += game.r(a1, a2) * x2[static_cast<std::size_t>(a2)];
      s_row += game.s(a1, a2) * x2[static_cast<std::size_t>(a2)];
    }
    num += x1[static_cast<std::size_t>(a1)] * r_row;
    den += x1[static_cast<std::size_t>(a1)] * s_row;
  }
  return num / den;
}

// The zero-sum pair has utilities u1 = -V and u2 = V, so
// F = (grad_x1 V, -grad_x2 V) by the quotient rule. Returned as a plain
// (unweighted) VI problem over Delta(A1) x Delta(A2).
inline WeightedVIProblem ratio_operator(const RatioGame& game) {
  BlockSpace space({game.rows, game.cols});
  auto g = std::make_shared<RatioGame>(game);
  auto f = [g](const Vec& x) {
    const int m = g->rows, n = g->cols;
    Vec rx2(static_cast<std::size_t>(m), 0.0);
    Vec sx2(static_cast<std::size_t>(m), 0.0);
    Vec rtx1(static_cast<std::size_t>(n), 0.0);
    Vec stx1(static_cast<std::size_t>(n), 0.0);
    double num = 0.0, den = 0.0;
    for (int a1 = 0; a1 < m; ++a1) {
      const double w1 = x[static_cast<std::size_t>(a1)];
      for (int a2 = 0; a2 < n; ++a2) {
        const double w2 = x[static_cast<std::size_t>(m + a2)];
        const double rv = g->r(a1, a2);
        const double sv = g->s(a1, a2);
        rx2[static_cast<std::size_t>(a1)] += rv * w2;
        sx2[static_cast<std::size_t>(a1)] += sv * w2;
        rtx1[static_cast<std::size_t>(a2)] += rv * w1;
        stx1[static_cast<std::size_t>(a2)] += sv * w1;
        num += w1 * rv * w2;
        den += w1 * sv * w2;
      }
    }
    const double inv_den_sq = 1.0 / (den * den);
    Vec f_out(static_cast<std::size_t>(m + n));
    for (int a1 = 0; a1 < m; ++a1) {
      f_out[static_cast<std::size_t>(a1)] =
          (rx2[static_cast<std::size_t>(a1)] * den -
           sx2[static_cast<std::size_t>(a1)] * num) *
          inv_den_sq;
    }
    for (int a2 = 0; a2 < n; ++a2) {
      f_out[static_cast<std::size_t>(m + a2)] =
          -(rtx1[static_cast<std::size_t>(a2)] * den -
            stx1[static_cast<std::size_t>(a2)] * num) *
          inv_den_sq;
    }
    return f_out;
  };
  return WeightedVIProblem::vanilla(std::move(space), std::move(f));
}

// The 2x2 instance R = ((-1, eps), (-eps, 0)), S = ((s, s), (1, 1)) on which
// the plain Minty property provably fails. Transitions depend only on the
// row player: x1' S x2 = x1' (s, 1) for every x2.
inline RatioGame minty_counterexample(double epsilon, double s) {
  require(epsilon > 0.0 && epsilon < 1.0 && s > 0.0 && s < 1.0,
          "minty_counterexample: parameters must lie in (0, 1)");
  return RatioGame::create(2, 2, {-1.0, epsilon, -epsilon, 0.0},
                           {s, s, 1.0, 1.0});
}

struct MintyWitness {
  double candidate_p1 = 0.0;  // first coordinate of each candidate block
  double candidate_p2 = 0.0;
  double witness_p1 = 0.0;
  double witness_p2 = 0.0;
  double violation = 0.0;  // min over witnesses of <x - x*, F(x)>
};

struct MintyCertificate {
  static constexpr double kThreshold = -1e-6;
  int grid_resolution = 0;
  // Most negative violation found per candidate, maximized over candidates.
  double worst_violation = 0.0;
  bool valid = false;  // every candidate admits a witness below kThreshold
  std::vector<MintyWitness> witnesses;  // one row per grid candidate
};

namespace detail {

// Nelder-Mead over the unit square, minimizing fn(p1, p2).
template <typename Fn>
inline std::pair<std::array<double, 2>, double> nelder_mead_2d(
    Fn&& fn, double p1, double p2, double scale, int iterations) {
  auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };
  struct Vertex {
    std::array<double, 2> p;
    double value;
  };
  std::array<Vertex, 3> simplex;
  simplex[0] = {{clamp01(p1), clamp01(p2)}, 0.0};
  simplex[1] = {{clamp01(p1 + scale), clamp01(p2)}, 0.0};
  simplex[2] = {{clamp01(p1), clamp01(p2 + scale)}, 0.0};
  for (auto& v : simplex) v.value = fn(v.p[0], v.p[1]);
  for (int it = 0; it < iterations; ++it) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) {
                return a.value < b.value;
              });
    const auto& best = simplex[0];
    auto& worst = simplex[2];
    const double cx = 0.5 * (simplex[0].p[0] + simplex[1].p[0]);
    const double cy = 0.5 * (simplex[0].p[1] + simplex[1].p[1]);
    const double rx = clamp01(cx + (cx - worst.p[0]));
    const double ry = clamp01(cy + (cy - worst.p[1]));
    const double reflected = fn(rx, ry);
    if (reflected < best.value) {
      const double ex = clamp01(cx + 2.0 * (cx - worst.p[0]));
      const double ey = clamp01(cy + 2.0 * (cy - worst.p[1]));
      const double expanded = fn(ex, ey);
      if (expanded < reflected) {
        worst = {{ex, ey}, expanded};
      } else {
        worst = {{rx, ry}, reflected};
      }
    } else if (reflected < simplex[1].value) {
      worst = {{rx, ry}, reflected};
    } else {
      const double kx = clamp01(cx + 0.5 * (worst.p[0] - cx));
      const double ky = clamp01(cy + 0.5 * (worst.p[1] - cy));
      const double contracted = fn(kx, ky);
      if (contracted < worst.value) {
        worst = {{kx, ky}, contracted};
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[static_cast<std::size_t>(k)].p[0] = clamp01(
              best.p[0] + 0.5 * (simplex[static_cast<std::size_t>(k)].p[0] -
                                 best.p[0]));
          simplex[static_cast<std::size_t>(k)].p[1] = clamp01(
              best.p[1] + 0.5 * (simplex[static_cast<std::size_t>(k)].p[1] -
                                 best.p[1]));
          simplex[static_cast<std::size_t>(k)].value =
              fn(simplex[static_cast<std::size_t>(k)].p[0],
                 simplex[static_cast<std::size_t>(k)].p[1]);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  return {simplex[0].p, simplex[0].value};
}

}  // namespace detail

// Grid search for Minty violations on a 2x2 ratio game: every candidate
// reference point x* on a k x k grid over the two strategy simplices is
// matched against witnesses x (grid scan plus local refinement) minimizing
// <x - x*, F(x)>. The certificate is valid when every candidate admits a
// strictly negative witness below the threshold.
inline MintyCertificate minty_violation_search(const RatioGame& game, int k) {
  require(game.rows == 2 && game.cols == 2,
          "minty_violation_search: only 2x2 games are supported");
  require(k >= 11, "minty_violation_search: grid resolution must be >= 11");

  const WeightedVIProblem problem = ratio_operator(game);
  auto eval_f = problem.eval_F;
  auto point_of = [](double p1, double p2) {
    return Vec{p1, 1.0 - p1, p2, 1.0 - p2};
  };

  // F and <x, F(x)> precomputed on the witness grid; candidates reuse them.
  const int grid = k;
  std::vector<Vec> f_grid(static_cast<std::size_t>(grid * grid));
  Vec self_grid(static_cast<std::size_t>(grid * grid));
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double p1 = static_cast<double>(i) / (grid - 1);
      const double p2 = static_cast<double>(j) / (grid - 1);
      const Vec x = point_of(p1, p2);
      Vec f = eval_f(x);
      self_grid[static_cast<std::size_t>(i * grid + j)] = dot(x, f);
      f_grid[static_cast<std::size_t>(i * grid + j)] = std::move(f);
    }
  }

  MintyCertificate cert;
  cert.grid_resolution = k;
  cert.witnesses.resize(static_cast<std::size_t>(grid) *
                        static_cast<std::size_t>(grid));

  parallel_for(static_cast<std::size_t>(grid) * grid, [&](std::size_t c) {
    const int ci = static_cast<int>(c) / grid;
    const int cj = static_cast<int>(c) % grid;
    const double q1 = static_cast<double>(ci) / (grid - 1);
    const double q2 = static_cast<double>(cj) / (grid - 1);
    const Vec candidate = point_of(q1, q2);

    double best = std::numeric_limits<double>::infinity();
    int best_i = 0, best_j = 0;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const auto idx = static_cast<std::size_t>(i * grid + j);
        const double g = self_grid[idx] - dot(candidate, f_grid[idx]);
        if (g < best) {
          best = g;
          best_i = i;
          best_j = j;
        }
      }
    }

    auto objective = [&](double p1, double p2) {
      const Vec x = point_of(p1, p2);
      const Vec f = eval_f(x);
      return dot(x, f) - dot(candidate, f);
    };
    const auto [refined, value] = detail::nelder_mead_2d(
        objective, static_cast<double>(best_i) / (grid - 1),
        static_cast<double>(best_j) / (grid - 1), 1.0 / (grid - 1), 120);

    MintyWitness w;
    w.candidate_p1 = q1;
    w.candidate_p2 = q2;
    if (value < best) {
      w.witness_p1 = refined[0];
      w.witness_p2 = refined[1];
      w.violation = value;
    } else {
      w.witness_p1 = static_cast<double>(best_i) / (grid - 1);
      w.witness_p2 = static_cast<double>(best_j) / (grid - 1);
      w.violation = best;
    }
    cert.witnesses[c] = w;
  });

  cert.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& w : cert.witnesses) {
    cert.worst_violation = std::max(cert.worst_violation, w.violation);
  }
  cert.valid = cert.worst_violation <= MintyCertificate::kThreshold;
  return cert;
}

// Random ratio game of the reference experiment: R entries i.i.d. uniform on
// (0, 1); S rank-one with column-constant entries s_i i.i.d. uniform (0, 1),
// so the row player alone controls termination.
inline RatioGame random_ratio_game(int m, int n_cols, std::uint64_t seed) {
  require(m >= 1 && n_cols >= 1, "random_ratio_game: invalid shape");
  SplitMix64 rng(seed);
  Vec r(static_cast<std::size_t>(m) * n_cols);
  for (auto& v : r) v = rng.next_open01();
  Vec s_rows(static_cast<std::size_t>(m));
  for (auto& v : s_rows) v = rng.next_open01();
  Vec s(static_cast<std::size_t>(m) * n_cols);
  for (int a1 = 0; a1 < m; ++a1) {
    for (int a2 = 0; a2 < n_cols; ++a2) {
      s[static_cast<std::size_t>(a1 * n_cols + a2)] =
          s_rows[static_cast<std::size_t>(a1)];
    }
  }
  return RatioGame::create(m, n_cols, std::move(r), std::move(s));
}

// Single-state two-player zero-sum embedding: S gives the per-step
// termination probability, so the planned value of the column player equals
// the ratio-game value by the geometric series.
inline MarkovGame ratio_to_markov(const RatioGame& game) {
  const long long joint = static_cast<long long>(game.rows) * game.cols;
  std::vector<double> transitions(static_cast<std::size_t>(joint));
  std::vector<double> rewards(2 * static_cast<std::size_t>(joint));
  for (int a1 = 0; a1 < game.rows; ++a1) {
    for (int a2 = 0; a2 < game.cols; ++a2) {
      const auto j = static_cast<std::size_t>(a1 * game.cols + a2);
      transitions[j] = 1.0 - game.s(a1, a2);
      rewards[j] = -game.r(a1, a2);                                // player 1
      rewards[static_cast<std::size_t>(joint) + j] = game.r(a1, a2);  // player 2
    }
  }
  return MarkovGame(2, 1, {game.rows, game.cols}, std::move(transitions),
                    std::move(rewards), Vec{1.0}, game.zeta_bound);
}

namespace detail {

// Quantization grid shared by the generators: every stored probability and
// reward is an integer multiple of 2^-30, which keeps the zero-sum identity
// and row-sum margins exact in double arithmetic.
constexpr double kQuantum = 1.0 / 1073741824.0;  // 2^-30

inline double quantize(double v) {
  return std::round(v / kQuantum) * kQuantum;
}

// Substochastic row over `size` states with entries on the quantization grid
// summing exactly to target_units * 2^-30 (largest-remainder rounding).
inline void fill_quantized_row(SplitMix64& rng, long long target_units,
                               std::span<double> out) {
  const std::size_t size = out.size();
  Vec raw(size);
  double total = 0.0;
  for (auto& v : raw) {
    v = rng.next_open01();
    total += v;
  }
  std::vector<long long> units(size);
  std::vector<std::pair<double, std::size_t>> remainders(size);
  long long assigned = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const double ideal = static_cast<double>(target_units) * raw[i] / total;
    units[i] = static_cast<long long>(std::floor(ideal));
    remainders[i] = {ideal - std::floor(ideal), i};
    assigned += units[i];
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  long long leftover = target_units - assigned;
  for (std::size_t pos = 0; leftover > 0; pos = (pos + 1) % size) {
    units[remainders[pos].second] += 1;
    --leftover;
  }
  for (std::size_t pos = 0; leftover < 0; pos = (pos + 1) % size) {
    if (units[remainders[pos].second] > 0) {
      units[remainders[pos].second] -= 1;
      ++leftover;
    }
  }
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = static_cast<double>(units[i]) * kQuantum;
  }
}

}  // namespace detail

// Zero-sum polymatrix Markov game over an undirected interaction graph.
// Pairwise rewards are antisymmetric and scaled by the maximum degree so
// that per-player sums stay within [-1, 1]; the zero-sum identity holds
// exactly. Transitions depend only on the controller's action: one global
// controller (player 0) in single mode, controller s mod n in switching
// mode. Rows sum to 1 - zeta exactly after grid quantization (the stored
// zeta is the quantized margin).
inline MarkovGame random_polymatrix_zero_sum(
    int n, int states, const std::vector<int>& action_counts, double zeta,
    const std::vector<std::pair<int, int>>& edges, bool switching_controller,
    std::uint64_t seed) {
  require(n >= 2, "polymatrix: need at least two players");
  require(states >= 1 && zeta > 0.0 && zeta < 1.0,
          "polymatrix: invalid states or zeta");
  require(static_cast<int>(action_counts.size()) == n,
          "polymatrix: one action count per player");
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> canon;
  for (auto [a, b] : edges) {
    require(a >= 0 && a < n && b >= 0 && b < n && a != b,
            "polymatrix: edge endpoints must be distinct players");
    if (a > b) std::swap(a, b);
    for (const auto& e : canon) {
      require(!(e.first == a && e.second == b),
              "polymatrix: duplicate edge");
    }
    canon.emplace_back(a, b);
    degree[static_cast<std::size_t>(a)] += 1;
    degree[static_cast<std::size_t>(b)] += 1;
  }
  require(!canon.empty(), "polymatrix: need at least one edge");
  const int max_degree = *std::max_element(degree.begin(), degree.end());
  const double half_range = 1.0 / (2.0 * max_degree);

  SplitMix64 rng(seed);
  long long joint = 1;
  for (int k : action_counts) joint *= k;

  // Pairwise tables R_{a,b}(s, a_a, a_b), quantized; the mirror entry is the
  // exact negation.
  std::vector<Vec> pair_tables;
  pair_tables.reserve(canon.size());
  for (const auto& [a, b] : canon) {
    const int ka = action_counts[static_cast<std::size_t>(a)];
    const int kb = action_counts[static_cast<std::size_t>(b)];
    Vec table(static_cast<std::size_t>(states) * ka * kb);
    for (auto& v : table) {
      v = detail::quantize(rng.next_uniform(-half_range, half_range));
    }
    pair_tables.push_back(std::move(table));
  }

  // Controller transition rows, one per (state, controller action).
  const long long target_units =
      std::llround((1.0 - zeta) * 1073741824.0);
  const double stored_zeta =
      1.0 - static_cast<double>(target_units) * detail::kQuantum;
  std::vector<Vec> rows(static_cast<std::size_t>(states));
  std::vector<int> controller(static_cast<std::size_t>(states), 0);
  for (int s = 0; s < states; ++s) {
    controller[static_cast<std::size_t>(s)] = switching_controller ? s % n : 0;
    const int kc =
        action_counts[static_cast<std::size_t>(controller[static_cast<std::size_t>(s)])];
    rows[static_cast<std::size_t>(s)].resize(
        static_cast<std::size_t>(kc * states));
    for (int a = 0; a < kc; ++a) {
      detail::fill_quantized_row(
          rng, target_units,
          {rows[static_cast<std::size_t>(s)].data() +
               static_cast<std::size_t>(a * states),
           static_cast<std::size_t>(states)});
    }
  }

  std::vector<double> transitions(
      static_cast<std::size_t>(states * joint * states));
  std::vector<double> rewards(
      static_cast<std::size_t>(n) * static_cast<std::size_t>(states * joint),
      0.0);
  // Temporary game for joint decoding with the same action layout.
  std::vector<long long> strides(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i + 1)] *
        action_counts[static_cast<std::size_t>(i + 1)];
  }
  auto action_of = [&](long long j, int i) {
    return static_cast<int>((j / strides[static_cast<std::size_t>(i)]) %
                            action_counts[static_cast<std::size_t>(i)]);
  };

  for (int s = 0; s < states; ++s) {
    const int c = controller[static_cast<std::size_t>(s)];
    for (long long j = 0; j < joint; ++j) {
      const int ac = action_of(j, c);
      const double* row = rows[static_cast<std::size_t>(s)].data() +
                          static_cast<std::size_t>(ac * states);
      double* out = transitions.data() +
                    (static_cast<std::size_t>(s) * joint + j) * states;
      std::copy(row, row + states, out);

      for (std::size_t e = 0; e < canon.size(); ++e) {
        const auto [a, b] = canon[e];
        const int ka = action_counts[static_cast<std::size_t>(a)];
        const int kb = action_counts[static_cast<std::size_t>(b)];
        const double v = pair_tables[e][static_cast<std::size_t>(
            (s * ka + action_of(j, a)) * kb + action_of(j, b))];
        rewards[static_cast<std::size_t>(
            (static_cast<long long>(a) * states + s) * joint + j)] += v;
        rewards[static_cast<std::size_t>(
            (static_cast<long long>(b) * states + s) * joint + j)] -= v;
      }
    }
  }

  Vec rho(static_cast<std::size_t>(states), 1.0 / states);
  return MarkovGame(n, states, action_counts, std::move(transitions),
                    std::move(rewards), std::move(rho), stored_zeta);
}

// Two-player zero-sum game whose transitions are keyed on player 0's action.
inline MarkovGame two_player_zero_sum_single_controller(
    int states, const std::vector<int>& action_counts, double zeta,
    std::uint64_t seed) {
  require(action_counts.size() == 2, "need exactly two players");
  require(states >= 1 && zeta > 0.0 && zeta < 1.0, "invalid states or zeta");
  SplitMix64 rng(seed);
  const long long joint =
      static_cast<long long>(action_counts[0]) * action_counts[1];

  const long long target_units =
      std::llround((1.0 - zeta) * 1073741824.0);
  const double stored_zeta =
      1.0 - static_cast<double>(target_units) * detail::kQuantum;

  std::vector<double> rewards(static_cast<std::size_t>(2 * states * joint));
  for (int s = 0; s < states; ++s) {
    for (long long j = 0; j < joint; ++j) {
      const double v = detail::quantize(rng.next_uniform(-1.0, 1.0));
      rewards[static_cast<std::size_t>(
          (static_cast<long long>(1) * states + s) * joint + j)] = v;
      rewards[static_cast<std::size_t>(static_cast<long long>(s) * joint +
                                       j)] = -v;
    }
  }

  std::vector<double> transitions(
      static_cast<std::size_t>(states * joint * states));
  for (int s = 0; s < states; ++s) {
    for (int a1 = 0; a1 < action_counts[0]; ++a1) {
      Vec row(static_cast<std::size_t>(states));
      detail::fill_quantized_row(rng, target_units,
                                 {row.data(), row.size()});
      for (int a2 = 0; a2 < action_counts[1]; ++a2) {
        const long long j =
            static_cast<long long>(a1) * action_counts[1] + a2;
        std::copy(row.begin(), row.end(),
                  transitions.begin() +
                      (static_cast<std::size_t>(s) * joint + j) * states);
      }
    }
  }

  Vec rho(static_cast<std::size_t>(states), 1.0 / states);
  return MarkovGame(2, states, action_counts, std::move(transitions),
                    std::move(rewards), std::move(rho), stored_zeta);
}

}  // namespace mintygym

#endif  // MINTYGYM_GAME_ZOO_HPP_
