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
// Exact tabular planning for multi-player Markov games with a termination
// margin: values, Q functions, visitation distributions, policy gradients,
// best responses, equilibrium gaps, and the weighted VI operator for games
// with a single controller.

#ifndef MINTYGYM_MARKOV_GAME_HPP_
#define MINTYGYM_MARKOV_GAME_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "mintygym/block_space.hpp"
#include "mintygym/common.hpp"
#include "mintygym/random.hpp"
#include "mintygym/vi.hpp"

namespace mintygym {

// Tabular n-player Markov game. Transition rows are substochastic with a
// uniform termination margin zeta; rewards are deterministic in [-1, 1];
// the initial distribution has full support.
//
// Joint actions use a player-major mixed-radix index: player 0 is the most
// significant digit, so joint = sum_i a_i * stride_i with stride_{n-1} = 1
// and stride_i = stride_{i+1} * |A_{i+1}|. Tensors are flattened state-major:
// transitions[(s * J + j) * S + s'], rewards[(i * S + s) * J + j].
class MarkovGame {
 public:
  static constexpr long long kMaxJointEntries = 1000000;  // |S| * prod |A_i|

  MarkovGame(int num_players, int num_states, std::vector<int> action_counts,
             std::vector<double> transitions, std::vector<double> rewards,
             Vec rho, double zeta)
      : num_players_(num_players),
        num_states_(num_states),
        action_counts_(std::move(action_counts)),
        transitions_(std::move(transitions)),
        rewards_(std::move(rewards)),
        rho_(std::move(rho)),
        zeta_(zeta) {
    require(num_players_ >= 1, "MarkovGame: need at least one player");
    require(num_states_ >= 1, "MarkovGame: need at least one state");
    require(static_cast<int>(action_counts_.size()) == num_players_,
            "MarkovGame: one action count per player");
    joint_count_ = 1;
    for (int k : action_counts_) {
      require(k >= 1, "MarkovGame: action counts must be >= 1");
      joint_count_ *= k;
      require(joint_count_ * num_states_ <= kMaxJointEntries,
              "MarkovGame: joint action table exceeds the practical cap");
    }
    strides_.assign(static_cast<std::size_t>(num_players_), 1);
    for (int i = num_players_ - 2; i >= 0; --i) {
      strides_[static_cast<std::size_t>(i)] =
          strides_[static_cast<std::size_t>(i + 1)] *
          action_counts_[static_cast<std::size_t>(i + 1)];
    }
    decode_.resize(static_cast<std::size_t>(joint_count_ * num_players_));
    for (long long j = 0; j < joint_count_; ++j) {
      long long rem = j;
      for (int i = 0; i < num_players_; ++i) {
        const long long stride = strides_[static_cast<std::size_t>(i)];
        decode_[static_cast<std::size_t>(j * num_players_ + i)] =
            static_cast<int>(rem / stride);
        rem %= stride;
      }
    }
    validate();
  }

  int num_players() const { return num_players_; }
  int num_states() const { return num_states_; }
  const std::vector<int>& action_counts() const { return action_counts_; }
  int action_count(int i) const {
    return action_counts_[static_cast<std::size_t>(i)];
  }
  long long joint_count() const { return joint_count_; }
  const Vec& rho() const { return rho_; }
  double zeta() const { return zeta_; }
  const std::vector<double>& transitions() const { return transitions_; }
  const std::vector<double>& rewards() const { return rewards_; }

  long long joint_index(const std::vector<int>& actions) const {
    long long j = 0;
    for (int i = 0; i < num_players_; ++i) {
      j += static_cast<long long>(actions[static_cast<std::size_t>(i)]) *
           strides_[static_cast<std::size_t>(i)];
    }
    return j;
  }
  int action_of(long long joint, int player) const {
    return decode_[static_cast<std::size_t>(joint * num_players_ + player)];
  }
  long long stride(int player) const {
    return strides_[static_cast<std::size_t>(player)];
  }

  std::span<const double> transition_row(int s, long long j) const {
    return {transitions_.data() +
                (static_cast<long long>(s) * joint_count_ + j) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  double reward(int i, int s, long long j) const {
    return rewards_[static_cast<std::size_t>(
        (static_cast<long long>(i) * num_states_ + s) * joint_count_ + j)];
  }

  // Enforces the model invariants; throws ValidationError naming the
  // violated constraint.
  void validate() const {
    if (!(zeta_ > 0.0)) {
      throw ValidationError("MarkovGame: termination margin zeta > 0 required");
    }
    if (static_cast<long long>(transitions_.size()) !=
        static_cast<long long>(num_states_) * joint_count_ * num_states_) {
      throw ValidationError("MarkovGame: transition tensor has wrong size");
    }
    if (static_cast<long long>(rewards_.size()) !=
        static_cast<long long>(num_players_) * num_states_ * joint_count_) {
      throw ValidationError("MarkovGame: reward tensor has wrong size");
    }
    if (static_cast<int>(rho_.size()) != num_states_) {
      throw ValidationError("MarkovGame: rho has wrong size");
    }
    for (double p : transitions_) {
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError("MarkovGame: transition entries must be >= 0");
      }
    }
    for (int s = 0; s < num_states_; ++s) {
      for (long long j = 0; j < joint_count_; ++j) {
        double sum = 0.0;
        for (double p : transition_row(s, j)) sum += p;
        if (sum > 1.0 - zeta_ + 1e-12) {
          throw ValidationError(
              "MarkovGame: transition row exceeds 1 - zeta; the termination "
              "margin zeta > 0 must hold for every state and joint action");
        }
      }
    }
    for (double r : rewards_) {
      if (!std::isfinite(r) || r < -1.0 || r > 1.0) {
        throw ValidationError("MarkovGame: rewards must lie in [-1, 1]");
      }
    }
    double rho_sum = 0.0;
    for (double p : rho_) {
      if (!(p > 0.0)) {
        throw ValidationError("MarkovGame: rho must have full support");
      }
      rho_sum += p;
    }
    if (std::abs(rho_sum - 1.0) > 1e-9) {
      throw ValidationError("MarkovGame: rho must sum to one");
    }
  }

 private:
  int num_players_;
  int num_states_;
  std::vector<int> action_counts_;
  long long joint_count_ = 1;
  std::vector<long long> strides_;
  std::vector<int> decode_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
  Vec rho_;
  double zeta_;
};

// Per-player, per-state action distributions under direct parameterization.
// policies[i] is |S| x |A_i|, row-major by state.
struct PolicyProfile {
  std::vector<Vec> policies;

  Vec& row_data(int i) { return policies[static_cast<std::size_t>(i)]; }
  std::span<double> row(const MarkovGame& game, int i, int s) {
    return {policies[static_cast<std::size_t>(i)].data() +
                static_cast<std::size_t>(s) *
                    static_cast<std::size_t>(game.action_count(i)),
            static_cast<std::size_t>(game.action_count(i))};
  }
  std::span<const double> row(const MarkovGame& game, int i, int s) const {
    return {policies[static_cast<std::size_t>(i)].data() +
                static_cast<std::size_t>(s) *
                    static_cast<std::size_t>(game.action_count(i)),
            static_cast<std::size_t>(game.action_count(i))};
  }

  static PolicyProfile uniform(const MarkovGame& game) {
    PolicyProfile p;
    p.policies.resize(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i) {
      const int k = game.action_count(i);
      p.policies[static_cast<std::size_t>(i)].assign(
          static_cast<std::size_t>(game.num_states() * k), 1.0 / k);
    }
    return p;
  }
};

// Relaxed rows for the multilinear extension used by finite differences:
// entries >= 0, row sums in [0, 1 + kExtensionSlack]. Evaluating a pseudo
// profile additionally requires the induced chain to have spectral
// radius < 1.
struct PseudoPolicyProfile {
  static constexpr double kExtensionSlack = 0.1;
  std::vector<Vec> policies;

  static PseudoPolicyProfile of(const PolicyProfile& p) {
    return PseudoPolicyProfile{p.policies};
  }
};

// Per-state distribution over the joint action set.
struct CorrelatedPolicy {
  Vec per_state;  // [s * J + j]

  double prob(const MarkovGame& game, int s, long long j) const {
    return per_state[static_cast<std::size_t>(
        static_cast<long long>(s) * game.joint_count() + j)];
  }
};

struct PlanningResult {
  Vec values;              // [i * S + s]
  Vec q_values;            // [(i * S + s) * J + j]
  Vec visit_unnormalized;  // d-tilde over states
  Vec visit_normalized;

  double value(int i, int s, int num_states) const {
    return values[static_cast<std::size_t>(i * num_states + s)];
  }
};

inline void validate_profile(const MarkovGame& game,
                             const PolicyProfile& profile, double tol = 1e-9) {
  require(static_cast<int>(profile.policies.size()) == game.num_players(),
          "profile: wrong number of players");
  for (int i = 0; i < game.num_players(); ++i) {
    require(static_cast<long long>(
                profile.policies[static_cast<std::size_t>(i)].size()) ==
                static_cast<long long>(game.num_states()) *
                    game.action_count(i),
            "profile: wrong row sizes");
    for (int s = 0; s < game.num_states(); ++s) {
      double sum = 0.0;
      for (double p : profile.row(game, i, s)) {
        require(std::isfinite(p) && p >= -1e-12,
                "profile: entries must be nonnegative");
        sum += p;
      }
      require(std::abs(sum - 1.0) <= tol, "profile: rows must sum to one");
    }
  }
}

inline void validate_pseudo_profile(const MarkovGame& game,
                                    const PseudoPolicyProfile& profile) {
  require(static_cast<int>(profile.policies.size()) == game.num_players(),
          "pseudo profile: wrong number of players");
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& rows = profile.policies[static_cast<std::size_t>(i)];
    require(static_cast<long long>(rows.size()) ==
                static_cast<long long>(game.num_states()) *
                    game.action_count(i),
            "pseudo profile: wrong row sizes");
    for (int s = 0; s < game.num_states(); ++s) {
      double sum = 0.0;
      for (int a = 0; a < game.action_count(i); ++a) {
        const double p =
            rows[static_cast<std::size_t>(s * game.action_count(i) + a)];
        require(std::isfinite(p) && p >= -1e-12,
                "pseudo profile: entries must be nonnegative");
        sum += p;
      }
      require(sum <= 1.0 + PseudoPolicyProfile::kExtensionSlack + 1e-12,
              "pseudo profile: row sum exceeds the extension slack");
    }
  }
}

inline void validate_correlated(const MarkovGame& game,
                                const CorrelatedPolicy& mu) {
  require(static_cast<long long>(mu.per_state.size()) ==
              static_cast<long long>(game.num_states()) * game.joint_count(),
          "correlated policy: wrong size");
  for (int s = 0; s < game.num_states(); ++s) {
    double sum = 0.0;
    for (long long j = 0; j < game.joint_count(); ++j) {
      const double p = mu.prob(game, s, j);
      require(std::isfinite(p) && p >= -1e-12,
              "correlated policy: entries must be nonnegative");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9,
            "correlated policy: state rows must sum to one");
  }
}

namespace detail {

// Per-state distribution (or pseudo weights) over joint actions induced by a
// product profile.
inline Vec joint_weights(const MarkovGame& game,
                         const std::vector<Vec>& policies) {
  const int S = game.num_states();
  const long long J = game.joint_count();
  Vec w(static_cast<std::size_t>(S * J));
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      double p = 1.0;
      for (int i = 0; i < game.num_players(); ++i) {
        const int a = game.action_of(j, i);
        p *= policies[static_cast<std::size_t>(i)][static_cast<std::size_t>(
            s * game.action_count(i) + a)];
      }
      w[static_cast<std::size_t>(s * J + j)] = p;
    }
  }
  return w;
}

// Plans against an explicit per-state joint weighting. V solves
// (I - Pbar) V_i = rbar_i with Pbar the induced chain; Q is the one-step
// lookahead; the unnormalized visitation solves (I - Pbar^T) d = rho.
inline PlanningResult plan_with_weights(const MarkovGame& game, const Vec& w,
                                        bool check_spectral_radius) {
  const int S = game.num_states();
  const int n = game.num_players();
  const long long J = game.joint_count();

  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(S, S);
  Eigen::MatrixXd mean_reward = Eigen::MatrixXd::Zero(S, n);
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      const double p = w[static_cast<std::size_t>(s * J + j)];
      if (p == 0.0) continue;
      const auto row = game.transition_row(s, j);
      for (int s2 = 0; s2 < S; ++s2) chain(s, s2) += p * row[s2];
      for (int i = 0; i < n; ++i) {
        mean_reward(s, i) += p * game.reward(i, s, j);
      }
    }
  }

  if (check_spectral_radius) {
    const auto eigenvalues = chain.eigenvalues();
    double radius = 0.0;
    for (int k = 0; k < eigenvalues.size(); ++k) {
      radius = std::max(radius, std::abs(eigenvalues[k]));
    }
    if (radius >= 1.0 - 1e-12) {
      throw InvalidInputError(
          "pseudo profile: induced chain has spectral radius >= 1");
    }
  }

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S) - chain;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::MatrixXd values = lu.solve(mean_reward);
  if (!values.allFinite() ||
      (system * values - mean_reward).cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericalFailureError("plan: value linear system is singular");
  }

  PlanningResult result;
  result.values.resize(static_cast<std::size_t>(n * S));
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < S; ++s) {
      result.values[static_cast<std::size_t>(i * S + s)] = values(s, i);
    }
  }

  result.q_values.resize(static_cast<std::size_t>(n) *
                         static_cast<std::size_t>(S * J));
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      const auto row = game.transition_row(s, j);
      for (int i = 0; i < n; ++i) {
        double q = game.reward(i, s, j);
        for (int s2 = 0; s2 < S; ++s2) q += row[s2] * values(s2, i);
        result.q_values[static_cast<std::size_t>(
            (static_cast<long long>(i) * S + s) * J + j)] = q;
      }
    }
  }

  Eigen::Map<const Eigen::VectorXd> rho(game.rho().data(), S);
  Eigen::MatrixXd system_t = Eigen::MatrixXd::Identity(S, S) -
                             chain.transpose();
  Eigen::VectorXd visit = Eigen::PartialPivLU<Eigen::MatrixXd>(system_t)
                              .solve(rho);
  if (!visit.allFinite() ||
      (system_t * visit - rho).cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericalFailureError("plan: visitation linear system is singular");
  }
  result.visit_unnormalized.assign(visit.data(), visit.data() + S);
  const double total = visit.sum();
  result.visit_normalized.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    result.visit_normalized[static_cast<std::size_t>(s)] = visit[s] / total;
  }
  return result;
}

}  // namespace detail

inline PlanningResult plan(const MarkovGame& game,
                           const PolicyProfile& profile) {
  validate_profile(game, profile);
  return detail::plan_with_weights(
      game, detail::joint_weights(game, profile.policies), false);
}

inline PlanningResult plan(const MarkovGame& game,
                           const PseudoPolicyProfile& profile) {
  validate_pseudo_profile(game, profile);
  return detail::plan_with_weights(
      game, detail::joint_weights(game, profile.policies), true);
}

inline PlanningResult plan(const MarkovGame& game,
                           const CorrelatedPolicy& mu) {
  validate_correlated(game, mu);
  return detail::plan_with_weights(game, mu.per_state, false);
}

inline double rho_value(const MarkovGame& game, const PlanningResult& result,
                        int i) {
  double v = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    v += game.rho()[static_cast<std::size_t>(s)] *
         result.value(i, s, game.num_states());
  }
  return v;
}

// Expected Q of player i against the opponents' per-state mixtures:
// eq[s * |A_i| + a_i] = E_{a_{-i} ~ pi_{-i}(.|s)} Q_i(s, a_i, a_{-i}).
inline Vec expected_q(const MarkovGame& game, const PlanningResult& planned,
                      const PolicyProfile& profile, int i) {
  const int S = game.num_states();
  const long long J = game.joint_count();
  const int k = game.action_count(i);
  Vec eq(static_cast<std::size_t>(S * k), 0.0);
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      double w = 1.0;
      for (int other = 0; other < game.num_players(); ++other) {
        if (other == i) continue;
        w *= profile.row(game, other, s)[static_cast<std::size_t>(
            game.action_of(j, other))];
      }
      const double q = planned.q_values[static_cast<std::size_t>(
          (static_cast<long long>(i) * S + s) * J + j)];
      eq[static_cast<std::size_t>(s * k + game.action_of(j, i))] += w * q;
    }
  }
  return eq;
}

// The VI strategy space: one simplex block per (player, state) pair, ordered
// player-major, so block index = i * |S| + s.
inline BlockSpace policy_space(const MarkovGame& game) {
  std::vector<int> dims;
  dims.reserve(static_cast<std::size_t>(game.num_players()) *
               static_cast<std::size_t>(game.num_states()));
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      dims.push_back(game.action_count(i));
    }
  }
  return BlockSpace(std::move(dims));
}

inline Vec profile_to_point(const MarkovGame& game,
                            const PolicyProfile& profile) {
  Vec x;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& rows = profile.policies[static_cast<std::size_t>(i)];
    x.insert(x.end(), rows.begin(), rows.end());
  }
  return x;
}

inline PolicyProfile point_to_profile(const MarkovGame& game, const Vec& x) {
  PolicyProfile profile;
  profile.policies.resize(static_cast<std::size_t>(game.num_players()));
  std::size_t cursor = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    const std::size_t len = static_cast<std::size_t>(game.num_states()) *
                            static_cast<std::size_t>(game.action_count(i));
    profile.policies[static_cast<std::size_t>(i)]
        .assign(x.begin() + cursor, x.begin() + cursor + len);
    cursor += len;
  }
  require(cursor == x.size(), "point_to_profile: dimension mismatch");
  return profile;
}

// Gradient of V_i(rho) in the direct parameterization:
// d V_i / d x_{i,s}[a_i] = d_tilde[s] * E_{a_{-i}} Q_i(s, a). Returned flat
// in the policy_space block layout. This equals the derivative of the
// multilinear pseudo-policy extension.
inline Vec policy_gradient(const MarkovGame& game,
                           const PolicyProfile& profile) {
  const PlanningResult planned = plan(game, profile);
  Vec grad;
  grad.reserve(static_cast<std::size_t>(policy_space(game).total_dim()));
  for (int i = 0; i < game.num_players(); ++i) {
    const Vec eq = expected_q(game, planned, profile, i);
    const int k = game.action_count(i);
    for (int s = 0; s < game.num_states(); ++s) {
      const double dt = planned.visit_unnormalized[static_cast<std::size_t>(s)];
      for (int a = 0; a < k; ++a) {
        grad.push_back(dt * eq[static_cast<std::size_t>(s * k + a)]);
      }
    }
  }
  return grad;
}

struct ValueDifferenceAudit {
  double lhs = 0.0;  // V_i(alt, pi_{-i}) - V_i(pi), both at rho
  double rhs = 0.0;  // visitation-weighted linear form
};

// The value-difference identity: both sides agree up to solver precision.
inline ValueDifferenceAudit value_difference_audit(const MarkovGame& game,
                                                   const PolicyProfile& profile,
                                                   int i,
                                                   const Vec& alt_policy_i) {
  PolicyProfile alt = profile;
  alt.policies[static_cast<std::size_t>(i)] = alt_policy_i;
  validate_profile(game, alt);

  const PlanningResult base = plan(game, profile);
  const PlanningResult deviated = plan(game, alt);
  const Vec eq = expected_q(game, base, profile, i);

  ValueDifferenceAudit audit;
  audit.lhs = rho_value(game, deviated, i) - rho_value(game, base, i);
  const int k = game.action_count(i);
  for (int s = 0; s < game.num_states(); ++s) {
    const auto new_row = alt.row(game, i, s);
    const auto old_row = profile.row(game, i, s);
    double inner = 0.0;
    for (int a = 0; a < k; ++a) {
      inner += (new_row[static_cast<std::size_t>(a)] -
                old_row[static_cast<std::size_t>(a)]) *
               eq[static_cast<std::size_t>(s * k + a)];
    }
    audit.rhs +=
        deviated.visit_unnormalized[static_cast<std::size_t>(s)] * inner;
  }
  return audit;
}

namespace detail {

// Opponent weights per (state, joint action) with player i's factor removed.
// For a product profile this is prod_{k != i} x_k; for a correlated policy it
// is the marginal over A_{-i}.
inline Vec opponent_weights(const MarkovGame& game, int i,
                            const PolicyProfile& profile) {
  const int S = game.num_states();
  const long long J = game.joint_count();
  Vec w(static_cast<std::size_t>(S * J));
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      double p = 1.0;
      for (int other = 0; other < game.num_players(); ++other) {
        if (other == i) continue;
        p *= profile.row(game, other, s)[static_cast<std::size_t>(
            game.action_of(j, other))];
      }
      w[static_cast<std::size_t>(s * J + j)] = p;
    }
  }
  return w;
}

inline Vec opponent_weights(const MarkovGame& game, int i,
                            const CorrelatedPolicy& mu) {
  const int S = game.num_states();
  const long long J = game.joint_count();
  const long long stride = game.stride(i);
  Vec w(static_cast<std::size_t>(S * J), 0.0);
  for (int s = 0; s < S; ++s) {
    // Marginalize out player i's digit, then broadcast the marginal back to
    // every joint action sharing the same a_{-i}.
    for (long long j = 0; j < J; ++j) {
      const long long reduced = j - game.action_of(j, i) * stride;
      w[static_cast<std::size_t>(s * J + reduced)] += mu.prob(game, s, j);
    }
    for (long long j = 0; j < J; ++j) {
      const long long reduced = j - game.action_of(j, i) * stride;
      if (j != reduced) {
        w[static_cast<std::size_t>(s * J + j)] =
            w[static_cast<std::size_t>(s * J + reduced)];
      }
    }
  }
  return w;
}

struct InducedMdp {
  Vec reward;      // [s * |A_i| + a]
  Vec transition;  // [(s * |A_i| + a) * S + s']
};

inline InducedMdp induced_mdp(const MarkovGame& game, int i,
                              const Vec& opponent_w) {
  const int S = game.num_states();
  const long long J = game.joint_count();
  const int k = game.action_count(i);
  InducedMdp mdp;
  mdp.reward.assign(static_cast<std::size_t>(S * k), 0.0);
  mdp.transition.assign(static_cast<std::size_t>(S * k) *
                            static_cast<std::size_t>(S),
                        0.0);
  for (int s = 0; s < S; ++s) {
    for (long long j = 0; j < J; ++j) {
      const double w = opponent_w[static_cast<std::size_t>(s * J + j)];
      if (w == 0.0) continue;
      const int a = game.action_of(j, i);
      mdp.reward[static_cast<std::size_t>(s * k + a)] +=
          w * game.reward(i, s, j);
      const auto row = game.transition_row(s, j);
      double* out =
          mdp.transition.data() + static_cast<std::size_t>(s * k + a) * S;
      for (int s2 = 0; s2 < S; ++s2) out[s2] += w * row[s2];
    }
  }
  return mdp;
}

// Best response in the induced single-agent MDP: value iteration to
// tolerance 1e-10 * zeta, then an exact linear solve on the greedy policy.
// Ties break toward the lowest action index.
inline std::pair<Vec, double> solve_induced_mdp(const MarkovGame& game,
                                                int i, const InducedMdp& mdp) {
  const int S = game.num_states();
  const int k = game.action_count(i);
  const double tol = 1e-10 * game.zeta();
  Vec value(static_cast<std::size_t>(S), 0.0);
  Vec next(static_cast<std::size_t>(S), 0.0);
  std::vector<int> greedy(static_cast<std::size_t>(S), 0);
  for (long long iter = 0;; ++iter) {
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < k; ++a) {
        double q = mdp.reward[static_cast<std::size_t>(s * k + a)];
        const double* row =
            mdp.transition.data() + static_cast<std::size_t>(s * k + a) * S;
        for (int s2 = 0; s2 < S; ++s2) {
          q += row[s2] * value[static_cast<std::size_t>(s2)];
        }
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      next[static_cast<std::size_t>(s)] = best;
      greedy[static_cast<std::size_t>(s)] = best_a;
      residual = std::max(
          std::abs(best - value[static_cast<std::size_t>(s)]), residual);
    }
    value.swap(next);
    if (residual <= tol) break;
    if (iter > 10000000) {
      throw NumericalFailureError("best_response: value iteration stalled");
    }
  }

  // Exact value of the greedy policy by a dense solve on its induced chain.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S);
  Eigen::VectorXd reward(S);
  for (int s = 0; s < S; ++s) {
    const int a = greedy[static_cast<std::size_t>(s)];
    reward[s] = mdp.reward[static_cast<std::size_t>(s * k + a)];
    const double* row =
        mdp.transition.data() + static_cast<std::size_t>(s * k + a) * S;
    for (int s2 = 0; s2 < S; ++s2) system(s, s2) -= row[s2];
  }
  Eigen::VectorXd exact = Eigen::PartialPivLU<Eigen::MatrixXd>(system)
                              .solve(reward);
  if (!exact.allFinite()) {
    throw NumericalFailureError("best_response: singular greedy system");
  }

  Vec policy(static_cast<std::size_t>(S * k), 0.0);
  for (int s = 0; s < S; ++s) {
    policy[static_cast<std::size_t>(s * k + greedy[static_cast<std::size_t>(
                                                s)])] = 1.0;
  }
  double v_dagger = 0.0;
  for (int s = 0; s < S; ++s) {
    v_dagger += game.rho()[static_cast<std::size_t>(s)] * exact[s];
  }
  return {std::move(policy), v_dagger};
}

}  // namespace detail

struct BestResponse {
  Vec policy;  // deterministic greedy policy of player i, [s * |A_i| + a]
  double value = 0.0;  // V_i at rho under (policy, opponents)
};

inline BestResponse best_response(const MarkovGame& game,
                                  const PolicyProfile& profile, int i) {
  validate_profile(game, profile);
  const auto mdp =
      detail::induced_mdp(game, i, detail::opponent_weights(game, i, profile));
  auto [policy, value] = detail::solve_induced_mdp(game, i, mdp);
  return {std::move(policy), value};
}

inline BestResponse best_response(const MarkovGame& game,
                                  const CorrelatedPolicy& mu, int i) {
  validate_correlated(game, mu);
  const auto mdp =
      detail::induced_mdp(game, i, detail::opponent_weights(game, i, mu));
  auto [policy, value] = detail::solve_induced_mdp(game, i, mdp);
  return {std::move(policy), value};
}

// Largest unilateral improvement max_i V_i(dagger) - V_i(pi) at rho.
inline double ne_gap(const MarkovGame& game, const PolicyProfile& profile) {
  const PlanningResult planned = plan(game, profile);
  double gap = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const double benefit =
        best_response(game, profile, i).value - rho_value(game, planned, i);
    if (benefit < -1e-8) {
      throw NumericalFailureError(
          "ne_gap: best response fell below the planned value");
    }
    gap = std::max(gap, benefit);
  }
  return std::max(gap, 0.0);
}

// Sum of deviation benefits against a correlated policy; may be negative in
// zero-sum-like games.
inline double acce_gap(const MarkovGame& game, const CorrelatedPolicy& mu) {
  const PlanningResult planned = plan(game, mu);
  double total = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    total += best_response(game, mu, i).value - rho_value(game, planned, i);
  }
  return total;
}

inline PolicyProfile marginalize(const CorrelatedPolicy& mu,
                                 const MarkovGame& game) {
  validate_correlated(game, mu);
  PolicyProfile profile;
  profile.policies.resize(static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    const int k = game.action_count(i);
    profile.policies[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(game.num_states() * k), 0.0);
  }
  for (int s = 0; s < game.num_states(); ++s) {
    for (long long j = 0; j < game.joint_count(); ++j) {
      const double p = mu.prob(game, s, j);
      for (int i = 0; i < game.num_players(); ++i) {
        profile.row(game, i, s)[static_cast<std::size_t>(
            game.action_of(j, i))] += p;
      }
    }
  }
  return profile;
}

// The smallest player whose action alone determines every transition row,
// checked exactly across all joint actions; nullopt when none exists.
inline std::optional<int> single_controller_of(const MarkovGame& game) {
  for (int i = 0; i < game.num_players(); ++i) {
    bool controller = true;
    for (int s = 0; s < game.num_states() && controller; ++s) {
      for (long long j = 0; j < game.joint_count() && controller; ++j) {
        // Representative joint action: same a_i, all other digits zero.
        const long long rep =
            static_cast<long long>(game.action_of(j, i)) * game.stride(i);
        if (rep == j) continue;
        const auto row = game.transition_row(s, j);
        const auto rep_row = game.transition_row(s, rep);
        for (int s2 = 0; s2 < game.num_states(); ++s2) {
          if (row[s2] != rep_row[s2]) {
            controller = false;
            break;
          }
        }
      }
    }
    if (controller) return i;
  }
  return std::nullopt;
}

// gamma-greedy exploration map: pi_i(a|s) = (1 - gamma) x + gamma / |A_i|.
inline PolicyProfile greedy_map(const MarkovGame& game,
                                const PolicyProfile& x, double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, "greedy_map: gamma must be in [0, 1]");
  PolicyProfile out = x;
  for (int i = 0; i < game.num_players(); ++i) {
    const double mix = gamma / game.action_count(i);
    for (double& p : out.policies[static_cast<std::size_t>(i)]) {
      p = (1.0 - gamma) * p + mix;
    }
  }
  return out;
}

struct TheoremConstants {
  double d = 0.0;                 // block count n |S|
  double diameter_squared = 0.0;  // 2 n |S|
  double h = 0.0;
  double ell = 0.0;
  double lipschitz_F = 0.0;  // L
  double b_f = 0.0;
  double alpha = 0.0;
};

inline TheoremConstants theorem_constants(const MarkovGame& game) {
  const double zeta = game.zeta();
  const double rho_max =
      *std::max_element(game.rho().begin(), game.rho().end());
  double sum_actions = 0.0, sum_actions_sq = 0.0, max_actions = 0.0;
  for (int k : game.action_counts()) {
    sum_actions += k;
    sum_actions_sq += static_cast<double>(k) * k;
    max_actions = std::max(max_actions, static_cast<double>(k));
  }
  TheoremConstants c;
  c.d = static_cast<double>(game.num_players()) * game.num_states();
  c.diameter_squared = 2.0 * c.d;
  c.h = std::max(1.0 / zeta, 1.0 / rho_max);
  c.ell = std::min(zeta, rho_max);
  c.lipschitz_F = 4.0 * std::sqrt(sum_actions_sq) / (zeta * zeta * zeta);
  c.b_f = std::sqrt(max_actions) / (zeta * zeta);
  c.alpha = std::sqrt(game.num_states() * sum_actions) /
            (zeta * zeta * rho_max * rho_max);
  return c;
}

enum class OperatorMode { kVanilla, kWeighted, kWeightedEstimated };

// Estimated controller weights: given the controller's played policy
// (|S| x |A_c| rows, flat) and the evaluation index, returns per-state
// weights approximating 1 / d_tilde.
using EstimatedWeightFn =
    std::function<Vec(const Vec& controller_policy, long long evaluation)>;

namespace detail {

// Unnormalized visitation of the chain driven by the controller's policy
// alone; valid only for single-controller games.
inline Vec controller_visitation(const MarkovGame& game, int controller,
                                 const Vec& controller_policy) {
  const int S = game.num_states();
  const int k = game.action_count(controller);
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < k; ++a) {
      const long long rep =
          static_cast<long long>(a) * game.stride(controller);
      const double p =
          controller_policy[static_cast<std::size_t>(s * k + a)];
      const auto row = game.transition_row(s, rep);
      for (int s2 = 0; s2 < S; ++s2) chain(s, s2) += p * row[s2];
    }
  }
  Eigen::Map<const Eigen::VectorXd> rho(game.rho().data(), S);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S) -
                           chain.transpose();
  Eigen::VectorXd visit = Eigen::PartialPivLU<Eigen::MatrixXd>(system)
                              .solve(rho);
  if (!visit.allFinite()) {
    throw NumericalFailureError("controller visitation solve failed");
  }
  return Vec(visit.data(), visit.data() + S);
}

}  // namespace detail

// The optimistic policy-gradient VI problem of the game. F is the negated
// value gradient at the played profile (1 - gamma) x + gamma * uniform,
// scaled by the chain-rule factor (1 - gamma). In weighted mode the
// controller's blocks carry A[s] = 1 / d_tilde[s], with d_tilde computed
// from the controller's played policy alone; all other blocks carry 1.
inline WeightedVIProblem build_operator(
    std::shared_ptr<const MarkovGame> game, OperatorMode mode,
    double exploration_gamma = 0.0,
    EstimatedWeightFn estimated_weights = nullptr) {
  require(game != nullptr, "build_operator: null game");
  require(exploration_gamma >= 0.0 && exploration_gamma < 1.0,
          "build_operator: exploration gamma must lie in [0, 1)");
  std::optional<int> controller;
  if (mode != OperatorMode::kVanilla) {
    controller = single_controller_of(*game);
    if (!controller) {
      throw UnsupportedStructureError(
          "weighted mode requires a single controller");
    }
  }
  if (mode == OperatorMode::kWeightedEstimated) {
    require(estimated_weights != nullptr,
            "build_operator: estimated mode needs a weight callback");
  }

  const TheoremConstants constants = theorem_constants(*game);
  WeightedVIProblem problem;
  problem.space = policy_space(*game);
  problem.lipschitz_A =
      mode == OperatorMode::kVanilla ? 0.0 : constants.alpha;
  problem.operator_block_bound = constants.b_f;
  if (mode == OperatorMode::kVanilla) {
    problem.ell = 1.0;
    problem.h = 1.0;
  } else {
    // The provable range of the controller weights is
    // [zeta, 1 / min_s rho[s]]; for uniform rho this coincides with the
    // (ell, h) of theorem_constants, and it stays valid when rho is skewed.
    const double rho_min =
        *std::min_element(game->rho().begin(), game->rho().end());
    problem.ell = std::min(game->zeta(), rho_min);
    problem.h = std::max(1.0 / game->zeta(), 1.0 / rho_min);
  }

  const double gamma = exploration_gamma;
  problem.eval_F = [game, gamma](const Vec& x) {
    PolicyProfile played = point_to_profile(*game, x);
    if (gamma > 0.0) played = greedy_map(*game, played, gamma);
    Vec grad = policy_gradient(*game, played);
    const double scale = -(1.0 - gamma);
    for (double& g : grad) g *= scale;
    return grad;
  };

  if (mode == OperatorMode::kVanilla) {
    problem.eval_A = nullptr;
    return problem;
  }

  const int c = *controller;
  const BlockSpace space = problem.space;
  if (mode == OperatorMode::kWeighted) {
    problem.eval_A = [game, gamma, c, space](const Vec& x) {
      PolicyProfile played = point_to_profile(*game, x);
      if (gamma > 0.0) played = greedy_map(*game, played, gamma);
      const Vec visit = detail::controller_visitation(
          *game, c, played.policies[static_cast<std::size_t>(c)]);
      Vec a(static_cast<std::size_t>(space.total_dim()), 1.0);
      for (int s = 0; s < game->num_states(); ++s) {
        const int r = c * game->num_states() + s;
        const double w = 1.0 / visit[static_cast<std::size_t>(s)];
        for (auto& v : space.block(a, r)) v = w;
      }
      return a;
    };
    return problem;
  }

  // Estimated weights; the callback is invoked once per solver evaluation,
  // in evaluation order.
  auto counter = std::make_shared<long long>(0);
  problem.eval_A = [game, gamma, c, space, estimated_weights,
                    counter](const Vec& x) {
    PolicyProfile played = point_to_profile(*game, x);
    if (gamma > 0.0) played = greedy_map(*game, played, gamma);
    const Vec weights = estimated_weights(
        played.policies[static_cast<std::size_t>(c)], (*counter)++);
    require(static_cast<int>(weights.size()) == game->num_states(),
            "estimated weights: one weight per state expected");
    Vec a(static_cast<std::size_t>(space.total_dim()), 1.0);
    for (int s = 0; s < game->num_states(); ++s) {
      const int r = c * game->num_states() + s;
      for (auto& v : space.block(a, r)) {
        v = weights[static_cast<std::size_t>(s)];
      }
    }
    return a;
  };
  return problem;
}

struct GradientDominanceBound {
  double value_gap = 0.0;
  double linear_gap = 0.0;
  // ||d / rho||_inf / zeta for one concrete best response; an upper bound on
  // the mismatch coefficient, which minimizes over all best responses.
  double coefficient_bound = 0.0;
  bool holds = false;
};

inline GradientDominanceBound gradient_dominance_bound(
    const MarkovGame& game, const PolicyProfile& profile, int i) {
  const PlanningResult planned = plan(game, profile);
  const Vec eq = expected_q(game, planned, profile, i);
  const BestResponse br = best_response(game, profile, i);

  GradientDominanceBound out;
  out.value_gap = br.value - rho_value(game, planned, i);

  const int k = game.action_count(i);
  for (int s = 0; s < game.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    double played = 0.0;
    const auto row = profile.row(game, i, s);
    for (int a = 0; a < k; ++a) {
      const double q = eq[static_cast<std::size_t>(s * k + a)];
      best = std::max(best, q);
      played += row[static_cast<std::size_t>(a)] * q;
    }
    out.linear_gap +=
        planned.visit_unnormalized[static_cast<std::size_t>(s)] *
        (best - played);
  }

  PolicyProfile deviated = profile;
  deviated.policies[static_cast<std::size_t>(i)] = br.policy;
  const PlanningResult br_planned = plan(game, deviated);
  double mismatch = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    mismatch = std::max(
        mismatch, br_planned.visit_normalized[static_cast<std::size_t>(s)] /
                      game.rho()[static_cast<std::size_t>(s)]);
  }
  out.coefficient_bound = mismatch / game.zeta();
  out.holds =
      out.value_gap <= out.coefficient_bound * out.linear_gap + 1e-9;
  return out;
}

// Largest observed per-player gradient difference quotient over the supplied
// profile pairs.
inline double smoothness_ratio(
    const MarkovGame& game,
    const std::vector<std::pair<PolicyProfile, PolicyProfile>>& pairs) {
  double worst = 0.0;
  for (const auto& [first, second] : pairs) {
    const Vec g1 = policy_gradient(game, first);
    const Vec g2 = policy_gradient(game, second);
    const Vec x1 = profile_to_point(game, first);
    const Vec x2 = profile_to_point(game, second);
    const double dx = std::sqrt(squared_distance(x1, x2));
    if (dx == 0.0) continue;
    std::size_t cursor = 0;
    for (int i = 0; i < game.num_players(); ++i) {
      const std::size_t len =
          static_cast<std::size_t>(game.num_states()) *
          static_cast<std::size_t>(game.action_count(i));
      double diff_sq = 0.0;
      for (std::size_t idx = cursor; idx < cursor + len; ++idx) {
        const double d = g1[idx] - g2[idx];
        diff_sq += d * d;
      }
      cursor += len;
      worst = std::max(worst, std::sqrt(diff_sq) / dx);
    }
  }
  return worst;
}

// Empirical Lipschitz estimate of the per-player value gradients over random
// policy pairs; bounded by 4 max_i |A_i| / zeta^3.
inline double smoothness_probe(const MarkovGame& game, int trials,
                               std::uint64_t seed) {
  require(trials >= 1, "smoothness_probe: need at least one trial");
  std::vector<std::pair<PolicyProfile, PolicyProfile>> pairs;
  pairs.reserve(static_cast<std::size_t>(trials));
  SplitMix64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    PolicyProfile a, b;
    a.policies.resize(static_cast<std::size_t>(game.num_players()));
    b.policies.resize(static_cast<std::size_t>(game.num_players()));
    for (int i = 0; i < game.num_players(); ++i) {
      for (int s = 0; s < game.num_states(); ++s) {
        const Vec ra = random_simplex_point(rng, game.action_count(i));
        const Vec rb = random_simplex_point(rng, game.action_count(i));
        auto& pa = a.policies[static_cast<std::size_t>(i)];
        auto& pb = b.policies[static_cast<std::size_t>(i)];
        pa.insert(pa.end(), ra.begin(), ra.end());
        pb.insert(pb.end(), rb.begin(), rb.end());
      }
    }
    pairs.emplace_back(std::move(a), std::move(b));
  }
  return smoothness_ratio(game, pairs);
}

}  // namespace mintygym

#endif  // MINTYGYM_MARKOV_GAME_HPP_
