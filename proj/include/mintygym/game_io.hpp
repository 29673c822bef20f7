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
// Game files: a versioned, human-readable text format. Numbers are written
// with 17 significant digits, so write-then-read reproduces every double bit
// for bit. Tensors are flattened state-major with player-major mixed-radix
// joint actions (see markov_game.hpp).
//
//   mintygym-game v1
//   players <n>
//   states <S>
//   actions <k_1> ... <k_n>
//   zeta <z>
//   rho <S numbers>
//   transitions            # then S*J lines of S numbers, row (s, j)
//   ...
//   rewards                # then n*S lines of J numbers, row (i, s)
//   ...
//   end

#ifndef MINTYGYM_GAME_IO_HPP_
#define MINTYGYM_GAME_IO_HPP_

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mintygym/common.hpp"
#include "mintygym/markov_game.hpp"

namespace mintygym {

namespace detail {

class GameTokenizer {
 public:
  GameTokenizer(std::istream& in, std::string origin)
      : in_(in), origin_(std::move(origin)) {}

  std::string next_token(const std::string& expectation) {
    std::string token;
    while (true) {
      if (cursor_ >= line_.size()) {
        if (!std::getline(in_, line_)) {
          throw ParseError(origin_ + ":" + std::to_string(line_number_) +
                           ": unexpected end of file, expected " +
                           expectation);
        }
        ++line_number_;
        cursor_ = 0;
        continue;
      }
      const char c = line_[cursor_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++cursor_;
        continue;
      }
      if (c == '#') {  // comment to end of line
        cursor_ = line_.size();
        continue;
      }
      break;
    }
    while (cursor_ < line_.size() && !std::isspace(line_[cursor_]) &&
           line_[cursor_] != '#') {
      token.push_back(line_[cursor_++]);
    }
    return token;
  }

  double next_number(const std::string& field) {
    const std::string token = next_token("a number for " + field);
    try {
      std::size_t consumed = 0;
      const double v = std::stod(token, &consumed);
      if (consumed != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw ParseError(origin_ + ":" + std::to_string(line_number_) +
                       ": expected a number for " + field + ", got '" +
                       token + "'");
    }
  }

  long long next_integer(const std::string& field) {
    const double v = next_number(field);
    const long long n = static_cast<long long>(v);
    if (static_cast<double>(n) != v) {
      throw ParseError(origin_ + ":" + std::to_string(line_number_) +
                       ": expected an integer for " + field);
    }
    return n;
  }

  void expect_keyword(const std::string& keyword) {
    const std::string token = next_token("keyword '" + keyword + "'");
    if (token != keyword) {
      throw ParseError(origin_ + ":" + std::to_string(line_number_) +
                       ": expected '" + keyword + "', got '" + token + "'");
    }
  }

 private:
  std::istream& in_;
  std::string origin_;
  std::string line_;
  std::size_t cursor_ = 0;
  long long line_number_ = 0;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_game(const MarkovGame& game, std::ostream& out) {
  out << "mintygym-game v1\n";
  out << "players " << game.num_players() << "\n";
  out << "states " << game.num_states() << "\n";
  out << "actions";
  for (int k : game.action_counts()) out << " " << k;
  out << "\n";
  out << "zeta " << detail::format_double(game.zeta()) << "\n";
  out << "rho";
  for (double p : game.rho()) out << " " << detail::format_double(p);
  out << "\n";
  out << "transitions\n";
  for (int s = 0; s < game.num_states(); ++s) {
    for (long long j = 0; j < game.joint_count(); ++j) {
      const auto row = game.transition_row(s, j);
      for (int s2 = 0; s2 < game.num_states(); ++s2) {
        out << (s2 ? " " : "") << detail::format_double(row[s2]);
      }
      out << "\n";
    }
  }
  out << "rewards\n";
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      for (long long j = 0; j < game.joint_count(); ++j) {
        out << (j ? " " : "")
            << detail::format_double(game.reward(i, s, j));
      }
      out << "\n";
    }
  }
  out << "end\n";
}

inline void write_game(const MarkovGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_game(game, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline MarkovGame read_game(std::istream& in, const std::string& origin) {
  detail::GameTokenizer tok(in, origin);
  tok.expect_keyword("mintygym-game");
  tok.expect_keyword("v1");
  tok.expect_keyword("players");
  const long long n = tok.next_integer("players");
  if (n < 1 || n > 64) {
    throw ParseError(origin + ": player count out of range");
  }
  tok.expect_keyword("states");
  const long long states = tok.next_integer("states");
  if (states < 1) throw ParseError(origin + ": state count out of range");
  tok.expect_keyword("actions");
  std::vector<int> action_counts;
  long long joint = 1;
  for (long long i = 0; i < n; ++i) {
    const long long k = tok.next_integer("action count");
    if (k < 1) throw ParseError(origin + ": action count out of range");
    joint *= k;
    if (joint * states > MarkovGame::kMaxJointEntries) {
      throw ParseError(origin + ": joint action table exceeds the cap");
    }
    action_counts.push_back(static_cast<int>(k));
  }
  tok.expect_keyword("zeta");
  const double zeta = tok.next_number("zeta");
  tok.expect_keyword("rho");
  Vec rho;
  for (long long s = 0; s < states; ++s) {
    rho.push_back(tok.next_number("rho[" + std::to_string(s) + "]"));
  }
  tok.expect_keyword("transitions");
  std::vector<double> transitions;
  transitions.reserve(static_cast<std::size_t>(states * joint * states));
  for (long long s = 0; s < states; ++s) {
    for (long long j = 0; j < joint; ++j) {
      for (long long s2 = 0; s2 < states; ++s2) {
        transitions.push_back(tok.next_number(
            "transition (s=" + std::to_string(s) + ", joint=" +
            std::to_string(j) + ", s'=" + std::to_string(s2) + ")"));
      }
    }
  }
  tok.expect_keyword("rewards");
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(n * states * joint));
  for (long long i = 0; i < n; ++i) {
    for (long long s = 0; s < states; ++s) {
      for (long long j = 0; j < joint; ++j) {
        rewards.push_back(tok.next_number(
            "reward (player=" + std::to_string(i) + ", s=" +
            std::to_string(s) + ", joint=" + std::to_string(j) + ")"));
      }
    }
  }
  tok.expect_keyword("end");
  // Construction enforces the model invariants (zeta margin, reward range,
  // full-support rho) and throws ValidationError naming the constraint.
  return MarkovGame(static_cast<int>(n), static_cast<int>(states),
                    std::move(action_counts), std::move(transitions),
                    std::move(rewards), std::move(rho), zeta);
}

inline MarkovGame read_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  return read_game(in, path);
}

}  // namespace mintygym

#endif  // MINTYGYM_GAME_IO_HPP_
