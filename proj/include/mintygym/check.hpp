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
// Support for the invariant-check battery: random general-sum games with no
// structural guarantees, interior profiles, and a finite-difference gradient
// oracle over the pseudo-policy extension. These deliberately avoid the
// analytic gradient path so they can serve as independent checks of it.

#ifndef MINTYGYM_CHECK_HPP_
#define MINTYGYM_CHECK_HPP_

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "mintygym/common.hpp"
#include "mintygym/game_zoo.hpp"
#include "mintygym/markov_game.hpp"
#include "mintygym/random.hpp"

namespace mintygym {

// General-sum test game: rewards uniform in [-1, 1], transition rows random
// over all states with margin zeta, everything on the quantization grid.
// Transitions genuinely depend on the full joint action.
inline MarkovGame random_game(int n, int states,
                              const std::vector<int>& action_counts,
                              double zeta, std::uint64_t seed) {
  require(n >= 1 && states >= 1 && zeta > 0.0 && zeta < 1.0,
          "random_game: invalid shape");
  SplitMix64 rng(seed);
  long long joint = 1;
  for (int k : action_counts) joint *= k;
  const long long target_units = std::llround((1.0 - zeta) * 1073741824.0);
  const double stored_zeta = 1.0 - static_cast<double>(target_units) /
                                       1073741824.0;

  std::vector<double> rewards(
      static_cast<std::size_t>(n) * static_cast<std::size_t>(states * joint));
  for (auto& r : rewards) {
    r = detail::quantize(rng.next_uniform(-1.0, 1.0));
  }
  std::vector<double> transitions(
      static_cast<std::size_t>(states * joint * states));
  for (long long row = 0; row < static_cast<long long>(states) * joint;
       ++row) {
    detail::fill_quantized_row(
        rng, target_units,
        {transitions.data() + row * states, static_cast<std::size_t>(states)});
  }
  Vec rho(static_cast<std::size_t>(states), 1.0 / states);
  return MarkovGame(n, states, action_counts, std::move(transitions),
                    std::move(rewards), std::move(rho), stored_zeta);
}

// Interior profile: random simplex rows pulled toward the centroid so every
// entry stays well above finite-difference step sizes.
inline PolicyProfile random_interior_profile(const MarkovGame& game,
                                             SplitMix64& rng,
                                             double mix = 0.1) {
  PolicyProfile profile;
  profile.policies.resize(static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    const int k = game.action_count(i);
    auto& rows = profile.policies[static_cast<std::size_t>(i)];
    for (int s = 0; s < game.num_states(); ++s) {
      Vec row = random_simplex_point(rng, k);
      for (double& p : row) p = (1.0 - mix) * p + mix / k;
      rows.insert(rows.end(), row.begin(), row.end());
    }
  }
  return profile;
}

// Central finite differences of V_i(rho) on the pseudo-policy extension:
// the coordinates are perturbed without re-normalizing. Independent of the
// analytic gradient path.
inline Vec fd_policy_gradient(const MarkovGame& game,
                              const PolicyProfile& profile, double step) {
  Vec grad;
  grad.reserve(static_cast<std::size_t>(policy_space(game).total_dim()));
  for (int i = 0; i < game.num_players(); ++i) {
    const int k = game.action_count(i);
    for (int s = 0; s < game.num_states(); ++s) {
      for (int a = 0; a < k; ++a) {
        const std::size_t idx = static_cast<std::size_t>(s * k + a);
        PseudoPolicyProfile hi = PseudoPolicyProfile::of(profile);
        PseudoPolicyProfile lo = PseudoPolicyProfile::of(profile);
        hi.policies[static_cast<std::size_t>(i)][idx] += step;
        lo.policies[static_cast<std::size_t>(i)][idx] -= step;
        const double v_hi = rho_value(game, plan(game, hi), i);
        const double v_lo = rho_value(game, plan(game, lo), i);
        grad.push_back((v_hi - v_lo) / (2.0 * step));
      }
    }
  }
  return grad;
}

// Worst relative error between the analytic and finite-difference gradients.
inline double gradient_consistency_error(const MarkovGame& game,
                                         const PolicyProfile& profile,
                                         double step,
                                         double corruption = 0.0) {
  Vec analytic = policy_gradient(game, profile);
  const Vec numeric = fd_policy_gradient(game, profile, step);
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    analytic[i] += corruption;
    const double scale = std::max(1.0, std::abs(numeric[i]));
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

}  // namespace mintygym

#endif  // MINTYGYM_CHECK_HPP_
