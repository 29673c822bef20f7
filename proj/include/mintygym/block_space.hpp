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

#ifndef MINTYGYM_BLOCK_SPACE_HPP_
#define MINTYGYM_BLOCK_SPACE_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "mintygym/common.hpp"

namespace mintygym {

// Cartesian product of probability simplices. Vectors over the space are
// stored flat; block r occupies [offset(r), offset(r) + dim(r)).
class BlockSpace {
 public:
  explicit BlockSpace(std::vector<int> block_dims)
      : dims_(std::move(block_dims)) {
    require(!dims_.empty(), "BlockSpace: need at least one block");
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (int k : dims_) {
      require(k >= 1, "BlockSpace: block dimension must be >= 1");
      offsets_.push_back(offsets_.back() + k);
    }
  }

  int block_count() const { return static_cast<int>(dims_.size()); }
  int block_dim(int r) const { return dims_[static_cast<std::size_t>(r)]; }
  int offset(int r) const { return offsets_[static_cast<std::size_t>(r)]; }
  int total_dim() const { return offsets_.back(); }
  const std::vector<int>& block_dims() const { return dims_; }

  std::span<double> block(Vec& v, int r) const {
    return {v.data() + offset(r), static_cast<std::size_t>(block_dim(r))};
  }
  std::span<const double> block(const Vec& v, int r) const {
    return {v.data() + offset(r), static_cast<std::size_t>(block_dim(r))};
  }

  // Every simplex block has l2 diameter sqrt(2) (distance between vertices).
  double block_diameter(int) const { return std::sqrt(2.0); }
  double diameter_squared() const { return 2.0 * block_count(); }
  double diameter() const { return std::sqrt(diameter_squared()); }
  double max_block_diameter() const { return std::sqrt(2.0); }

  // Block-wise uniform distributions.
  Vec centroid() const {
    Vec x(static_cast<std::size_t>(total_dim()));
    for (int r = 0; r < block_count(); ++r) {
      const double p = 1.0 / block_dim(r);
      for (auto& c : block(x, r)) c = p;
    }
    return x;
  }

  bool matches(const Vec& v) const {
    return static_cast<int>(v.size()) == total_dim();
  }

  bool operator==(const BlockSpace& other) const {
    return dims_ == other.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
};

// Euclidean projection onto the probability simplex, by sort and threshold.
// O(k log k); exact up to rounding.
inline Vec project_simplex(const Vec& v) {
  require(!v.empty(), "project_simplex: empty input");
  require(all_finite(v), "project_simplex: non-finite input");
  Vec sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double threshold = sorted[0] - 1.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) threshold = candidate;
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - threshold, 0.0);
  }
  return out;
}

// Projection onto the product set decomposes block-wise.
inline Vec project_blockwise(const BlockSpace& space, const Vec& v) {
  require(space.matches(v), "project_blockwise: dimension mismatch");
  require(all_finite(v), "project_blockwise: non-finite input");
  Vec out(v.size());
  for (int r = 0; r < space.block_count(); ++r) {
    const auto in = space.block(v, r);
    Vec blk = project_simplex(Vec(in.begin(), in.end()));
    std::copy(blk.begin(), blk.end(), space.block(out, r).begin());
  }
  return out;
}

inline Vec hadamard(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "hadamard: dimension mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// True when every block is nonnegative and sums to one within tol.
inline bool is_feasible(const BlockSpace& space, const Vec& x,
                        double tol = 1e-9) {
  if (!space.matches(x) || !all_finite(x)) return false;
  for (int r = 0; r < space.block_count(); ++r) {
    double sum = 0.0;
    for (double c : space.block(x, r)) {
      if (c < 0.0) return false;
      sum += c;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

inline void require_feasible(const BlockSpace& space, const Vec& x,
                             const std::string& what, double tol = 1e-9) {
  require(is_feasible(space, x, tol), what + ": point is not on the space");
}

// Re-normalizes each block onto its simplex. Validation helper only; the
// solver never calls this.
inline Vec normalized_onto(const BlockSpace& space, const Vec& x) {
  require(space.matches(x), "normalized_onto: dimension mismatch");
  return project_blockwise(space, x);
}

}  // namespace mintygym

#endif  // MINTYGYM_BLOCK_SPACE_HPP_
