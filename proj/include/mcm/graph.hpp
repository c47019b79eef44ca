// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcm/errors.hpp"

namespace mcm {

inline constexpr double kRowSumTolerance = 1e-9;

// One stored transition: the other endpoint of the edge and its probability.
// In a row list `node` is the child; in a parent list it is the parent.
struct Link {
  int node;
  double p;
};

using Edge = std::pair<int, int>;  // (u, v), directed

/// Sparse row-stochastic transition matrix over n nodes.
///
/// Rows hold the outgoing edges of each node (children), and a transposed
/// index holds the incoming edges (parents). Zero-probability edges are never
/// stored; every row must sum to 1 within kRowSumTolerance. Instances are
/// immutable after construction and safe to share across threads.
class TransitionMatrix {
 public:
  // rows[u] lists (child, probability) for node u. Validates stochasticity,
  // positivity and absence of duplicate targets, then builds the transpose.
  explicit TransitionMatrix(std::vector<std::vector<Link>> rows)
      : rows_(std::move(rows)), parents_(rows_.size()) {
    const int n = static_cast<int>(rows_.size());
    if (n == 0) throw DataError("transition matrix has no nodes");
    edge_count_ = 0;
    for (int u = 0; u < n; ++u) {
      auto& row = rows_[u];
      std::sort(row.begin(), row.end(),
                [](const Link& a, const Link& b) { return a.node < b.node; });
      double sum = 0.0;
      int prev = -1;
      for (const Link& link : row) {
        if (link.node < 0 || link.node >= n)
          throw DataError("edge target out of range in row " +
                          std::to_string(u));
        if (link.node == prev)
          throw DataError("duplicate edge target in row " + std::to_string(u));
        if (!(link.p > 0.0) || link.p > 1.0 + kRowSumTolerance)
          throw DataError("edge probability out of (0,1] in row " +
                          std::to_string(u));
        prev = link.node;
        sum += link.p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw DataError("row " + std::to_string(u) +
                        " is not stochastic (sum " + std::to_string(sum) + ")");
      edge_count_ += static_cast<int>(row.size());
    }
    for (int u = 0; u < n; ++u)
      for (const Link& link : rows_[u]) parents_[link.node].push_back({u, link.p});
  }

  int node_count() const { return static_cast<int>(rows_.size()); }
  int edge_count() const { return edge_count_; }

  std::span<const Link> row(int u) const { return rows_.at(u); }
  std::span<const Link> parents(int v) const { return parents_.at(v); }

  // 0 when the edge is absent.
  double probability(int u, int v) const {
    for (const Link& link : rows_.at(u))
      if (link.node == v) return link.p;
    return 0.0;
  }

  bool has_edge(int u, int v) const { return probability(u, v) > 0.0; }

  // All edges in (u, v) lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (int u = 0; u < node_count(); ++u)
      for (const Link& link : rows_[u]) out.emplace_back(u, link.node);
    return out;
  }

 private:
  std::vector<std::vector<Link>> rows_;
  std::vector<std::vector<Link>> parents_;
  int edge_count_;
};

/// Non-negative item masses per node. Real-valued: proportional placement
/// schemes and all downstream objectives are linear in the masses, so
/// integrality only matters for simulation (which validates it explicitly).
class ItemDistribution {
 public:
  explicit ItemDistribution(std::vector<double> masses)
      : masses_(std::move(masses)) {
    double total = 0.0;
    for (double v : masses_) {
      if (v < 0.0 || !std::isfinite(v))
        throw DataError("item masses must be finite and non-negative");
      total += v;
    }
    if (!(total > 0.0)) throw DataError("total item mass must be positive");
    total_ = total;
  }

  int size() const { return static_cast<int>(masses_.size()); }
  double operator[](int u) const { return masses_.at(u); }
  double total() const { return total_; }
  const std::vector<double>& values() const { return masses_; }

  // True when every mass is integral (within 1e-9), as simulation requires.
  bool is_integral() const {
    for (double v : masses_)
      if (std::abs(v - std::round(v)) > 1e-9) return false;
    return true;
  }

 private:
  std::vector<double> masses_;
  double total_;
};

inline void check_dimensions(const TransitionMatrix& matrix,
                             const ItemDistribution& items) {
  if (matrix.node_count() != items.size())
    throw DataError("item vector length " + std::to_string(items.size()) +
                    " does not match node count " +
                    std::to_string(matrix.node_count()));
}

}  // namespace mcm
