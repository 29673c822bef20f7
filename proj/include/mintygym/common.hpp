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

#ifndef MINTYGYM_COMMON_HPP_
#define MINTYGYM_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mintygym {

using Vec = std::vector<double>;

// Thrown when an argument violates a documented precondition.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when F or A returns a non-finite value; carries the query point.
struct OperatorFailureError : std::runtime_error {
  OperatorFailureError(const std::string& what, Vec point_in)
      : std::runtime_error(what), point(std::move(point_in)) {}
  Vec point;
};

// Weighted mode on a game without a single controller, etc.
struct UnsupportedStructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Audit requested on a report recorded at a cadence coarser than 1.
struct InsufficientRecordsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be parsed; message carries line/field context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File parsed but violates a model invariant; message names the constraint.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInputError(msg);
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double norm2(const Vec& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

}  // namespace mintygym

#endif  // MINTYGYM_COMMON_HPP_
