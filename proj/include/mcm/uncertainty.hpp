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

#include <span>
#include <string>
#include <vector>

#include "mcm/graph.hpp"

namespace mcm {

// Below this residual probability a node's mass counts as fully observed and
// its contribution is 0 (the limit of the 0/0 in the adjusted probabilities).
inline constexpr double kResidualEpsilon = 1e-12;

namespace detail {

// The functionals are non-negative; cancellation can leave values a few ulp
// away from an exact analytic zero. Snapping makes id tie-breaking agree
// between the incremental and from-scratch evaluation paths.
inline double snap_to_zero(double value) {
  return value < kResidualEpsilon ? 0.0 : value;
}

}  // namespace detail

/// An ordered node answer set together with the expected uncertainty achieved
/// after each prefix. The trace is non-increasing.
struct NodeSelection {
  std::vector<int> nodes;
  std::vector<double> objective_trace;

  double objective(double f0) const {
    return objective_trace.empty() ? f0 : objective_trace.back();
  }
};

/// Same, for directed-edge answer sets.
struct EdgeSelection {
  std::vector<Edge> edges;
  std::vector<double> objective_trace;

  double objective(double f0) const {
    return objective_trace.empty() ? f0 : objective_trace.back();
  }
};

struct UncertaintyReport {
  double f0;
  double f_sel;
  double ratio;  // f_sel / f0; 1 when f0 == 0
};

inline UncertaintyReport make_report(double f0, double f_sel) {
  return {f0, f_sel, f0 > 0.0 ? f_sel / f0 : 1.0};
}

/// Aggregate variance of the post-transition item counts with no monitoring:
/// sum over stored edges of x(u) p(u,v) (1 - p(u,v)).
inline double baseline_uncertainty(const TransitionMatrix& matrix,
                                   const ItemDistribution& items) {
  check_dimensions(matrix, items);
  double total = 0.0;
  for (int u = 0; u < matrix.node_count(); ++u) {
    const double mass = items[u];
    if (mass == 0.0) continue;
    for (const Link& link : matrix.row(u)) total += mass * link.p * (1.0 - link.p);
  }
  return total;
}

/// Expected item counts after one transition, z = xP. Preserves total mass.
inline std::vector<double> expected_items(const TransitionMatrix& matrix,
                                          const ItemDistribution& items) {
  check_dimensions(matrix, items);
  std::vector<double> z(matrix.node_count(), 0.0);
  for (int u = 0; u < matrix.node_count(); ++u)
    for (const Link& link : matrix.row(u)) z[link.node] += items[u] * link.p;
  return z;
}

namespace detail {

inline std::vector<char> node_mask(const TransitionMatrix& matrix,
                                   std::span<const int> nodes) {
  std::vector<char> mask(matrix.node_count(), 0);
  for (int v : nodes) {
    if (v < 0 || v >= matrix.node_count())
      throw DataError("node id " + std::to_string(v) + " out of range");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace detail

/// rho(u, S): probability mass from u into the monitored node set.
inline double residual_probability(const TransitionMatrix& matrix, int u,
                                   std::span<const int> monitored) {
  const auto mask = detail::node_mask(matrix, monitored);
  double rho = 0.0;
  for (const Link& link : matrix.row(u))
    if (mask[link.node]) rho += link.p;
  return rho;
}

/// Expected uncertainty when the arrivals at each node of `monitored` are
/// observed. Also the value for total-count queries on the same nodes, which
/// are expectation-equivalent.
inline double uncertainty_node(const TransitionMatrix& matrix,
                               const ItemDistribution& items,
                               std::span<const int> monitored) {
  check_dimensions(matrix, items);
  const auto mask = detail::node_mask(matrix, monitored);
  double total = 0.0;
  for (int u = 0; u < matrix.node_count(); ++u) {
    const double mass = items[u];
    if (mass == 0.0) continue;
    double rho = 0.0;
    for (const Link& link : matrix.row(u))
      if (mask[link.node]) rho += link.p;
    const double residual = 1.0 - rho;
    if (residual <= kResidualEpsilon) continue;
    // x'(u) p'(1-p') summed over unmonitored children reduces to
    // x(u) p (1 - p/residual).
    for (const Link& link : matrix.row(u))
      if (!mask[link.node]) total += mass * link.p * (1.0 - link.p / residual);
  }
  return detail::snap_to_zero(total);
}

/// Expected uncertainty when the transition counts over `monitored` edges are
/// observed.
inline double uncertainty_edge(const TransitionMatrix& matrix,
                               const ItemDistribution& items,
                               std::span<const Edge> monitored) {
  check_dimensions(matrix, items);
  // Per node, the probability mass on its monitored outgoing edges.
  std::vector<double> rho(matrix.node_count(), 0.0);
  std::vector<std::vector<int>> monitored_children(matrix.node_count());
  for (const Edge& e : monitored) {
    const double p = (e.first >= 0 && e.first < matrix.node_count())
                         ? matrix.probability(e.first, e.second)
                         : 0.0;
    if (p == 0.0)
      throw DataError("monitored edge (" + std::to_string(e.first) + "," +
                      std::to_string(e.second) + ") is not in the matrix");
    rho[e.first] += p;
    monitored_children[e.first].push_back(e.second);
  }
  double total = 0.0;
  for (int u = 0; u < matrix.node_count(); ++u) {
    const double mass = items[u];
    if (mass == 0.0) continue;
    const double residual = 1.0 - rho[u];
    if (residual <= kResidualEpsilon) continue;
    const auto& skip = monitored_children[u];
    for (const Link& link : matrix.row(u)) {
      bool observed = false;
      for (int c : skip)
        if (c == link.node) { observed = true; break; }
      if (!observed) total += mass * link.p * (1.0 - link.p / residual);
    }
  }
  return detail::snap_to_zero(total);
}

/// Expected uncertainty when the full departure counts of each node in
/// `monitored` are observed: those nodes drop out of the outer sum entirely.
inline double uncertainty_children(const TransitionMatrix& matrix,
                                   const ItemDistribution& items,
                                   std::span<const int> monitored) {
  check_dimensions(matrix, items);
  const auto mask = detail::node_mask(matrix, monitored);
  double total = 0.0;
  for (int u = 0; u < matrix.node_count(); ++u) {
    if (mask[u]) continue;
    const double mass = items[u];
    if (mass == 0.0) continue;
    for (const Link& link : matrix.row(u)) total += mass * link.p * (1.0 - link.p);
  }
  return total;
}

}  // namespace mcm
