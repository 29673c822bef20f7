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
// Hand-built fixture games shared across the test suites.

#ifndef MINTYGYM_TESTS_TEST_GAMES_HPP_
#define MINTYGYM_TESTS_TEST_GAMES_HPP_

#include <functional>
#include <vector>

#include "mintygym/markov_game.hpp"

namespace mintygym {

// Builds a game from per-entry callables; decode follows the library's
// player-major mixed-radix order.
inline MarkovGame make_game(
    int n, int states, const std::vector<int>& action_counts,
    const std::function<double(int i, int s, const std::vector<int>&)>& reward,
    const std::function<double(int s, const std::vector<int>&, int s2)>& trans,
    Vec rho, double zeta) {
  long long joint = 1;
  for (int k : action_counts) joint *= k;
  std::vector<long long> strides(action_counts.size(), 1);
  for (int i = static_cast<int>(action_counts.size()) - 2; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i + 1)] *
        action_counts[static_cast<std::size_t>(i + 1)];
  }
  auto decode = [&](long long j) {
    std::vector<int> a(action_counts.size());
    for (std::size_t i = 0; i < action_counts.size(); ++i) {
      a[i] = static_cast<int>((j / strides[i]) % action_counts[i]);
    }
    return a;
  };
  std::vector<double> transitions(
      static_cast<std::size_t>(states * joint * states));
  std::vector<double> rewards(static_cast<std::size_t>(n) *
                              static_cast<std::size_t>(states * joint));
  for (int s = 0; s < states; ++s) {
    for (long long j = 0; j < joint; ++j) {
      const auto a = decode(j);
      for (int s2 = 0; s2 < states; ++s2) {
        transitions[static_cast<std::size_t>(
            (static_cast<long long>(s) * joint + j) * states + s2)] =
            trans(s, a, s2);
      }
      for (int i = 0; i < n; ++i) {
        rewards[static_cast<std::size_t>(
            (static_cast<long long>(i) * states + s) * joint + j)] =
            reward(i, s, a);
      }
    }
  }
  return MarkovGame(n, states, action_counts, std::move(transitions),
                    std::move(rewards), std::move(rho), zeta);
}

// Single-state matching pennies with continuation probability 0.5:
// player 0 earns +1 on a match, player 1 earns +1 on a mismatch.
inline MarkovGame matching_pennies() {
  return make_game(
      2, 1, {2, 2},
      [](int i, int, const std::vector<int>& a) {
        const double match = a[0] == a[1] ? 1.0 : -1.0;
        return i == 0 ? match : -match;
      },
      [](int, const std::vector<int>&, int) { return 0.5; }, {1.0}, 0.5);
}

// One state, one player, one action, reward 1, continuation 0.5: the value
// is the geometric series 1 / zeta = 2.
inline MarkovGame geometric_unit_game() {
  return make_game(
      1, 1, {1}, [](int, int, const std::vector<int>&) { return 1.0; },
      [](int, const std::vector<int>&, int) { return 0.5; }, {1.0}, 0.5);
}

inline PolicyProfile profile_of(const MarkovGame& game,
                                std::vector<Vec> policies) {
  (void)game;
  PolicyProfile p;
  p.policies = std::move(policies);
  return p;
}

}  // namespace mintygym

#endif  // MINTYGYM_TESTS_TEST_GAMES_HPP_
