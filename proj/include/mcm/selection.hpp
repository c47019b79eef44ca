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
#include <limits>
#include <numeric>
#include <vector>

#include "mcm/graph.hpp"
#include "mcm/uncertainty.hpp"

namespace mcm {

namespace detail {

// Strict improvement with a tie margin. Analytically tied candidates can
// differ by a few ulp between evaluation paths; the margin lets scan order
// (smallest id, lexicographic edge) resolve them identically everywhere.
inline bool improves(double value, double best) {
  return value < best - 1e-12 * (1.0 + std::abs(best));
}

}  // namespace detail

/// Per-node bookkeeping for the incremental greedy algorithms.
///
/// `rho[u]` is the probability mass from u into the current answer set and
/// `b[u]` the un-normalized residual variance sum
///   b(u) = sum over unmonitored edges (u,v) of p (1 - rho(u) - p),
/// so that u contributes x(u) b(u) / (1 - rho(u)) to the objective. Both are
/// maintained under single-element extensions in O(1) per affected node.
struct GreedyState {
  std::vector<double> rho;
  std::vector<double> b;
  double current_objective;

  static GreedyState init(const TransitionMatrix& matrix,
                          const ItemDistribution& items) {
    GreedyState state;
    const int n = matrix.node_count();
    state.rho.assign(n, 0.0);
    state.b.assign(n, 0.0);
    state.current_objective = 0.0;
    for (int u = 0; u < n; ++u) {
      double sum = 0.0;
      for (const Link& link : matrix.row(u)) sum += link.p * (1.0 - link.p);
      state.b[u] = sum;
      state.current_objective += items[u] * sum;
    }
    return state;
  }

  // Contribution of node u to the objective under the current answer set.
  double term(const ItemDistribution& items, int u) const {
    const double residual = 1.0 - rho[u];
    if (residual <= kResidualEpsilon) return 0.0;
    return items[u] * b[u] / residual;
  }

  // Contribution of u after additionally observing mass p out of u.
  double term_after(const ItemDistribution& items, int u, double p) const {
    const double residual = 1.0 - rho[u] - p;
    if (residual <= kResidualEpsilon) return 0.0;
    return items[u] * (b[u] / residual - 2.0 * p);
  }

  // Commit the observation of mass p out of node u.
  void absorb(int u, double p) {
    b[u] -= 2.0 * p * (1.0 - rho[u] - p);
    rho[u] += p;
  }
};

/// Greedy node monitoring: k iterations, each adding the node that minimizes
/// the expected uncertainty of the extended set. Candidate evaluation reuses
/// GreedyState, so a full iteration costs O(|E|) after O(|E|) initialization.
/// Ties break toward the smallest node id.
inline NodeSelection node_greedy(const TransitionMatrix& matrix,
                                 const ItemDistribution& items, int k) {
  check_dimensions(matrix, items);
  const int n = matrix.node_count();
  if (k < 0 || k > n) throw DataError("budget k out of range");

  GreedyState state = GreedyState::init(matrix, items);
  std::vector<char> selected(n, 0);
  NodeSelection result;
  result.nodes.reserve(k);
  result.objective_trace.reserve(k);

  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v) {
      if (selected[v]) continue;
      // Only parents of v change their contribution.
      double value = state.current_objective;
      for (const Link& in : matrix.parents(v))
        value += state.term_after(items, in.node, in.p) -
                 state.term(items, in.node);
      value = detail::snap_to_zero(value);
      if (best < 0 || detail::improves(value, best_value)) {
        best_value = value;
        best = v;
      }
    }
    selected[best] = 1;
    for (const Link& in : matrix.parents(best)) state.absorb(in.node, in.p);
    state.current_objective = best_value;
    result.nodes.push_back(best);
    result.objective_trace.push_back(best_value);
  }
  return result;
}

/// Reference implementation of node_greedy that re-evaluates the objective
/// from scratch for every candidate. Used as an equivalence oracle.
inline NodeSelection node_greedy_naive(const TransitionMatrix& matrix,
                                       const ItemDistribution& items, int k) {
  check_dimensions(matrix, items);
  const int n = matrix.node_count();
  if (k < 0 || k > n) throw DataError("budget k out of range");

  std::vector<char> selected(n, 0);
  NodeSelection result;
  std::vector<int> candidate;
  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v) {
      if (selected[v]) continue;
      candidate = result.nodes;
      candidate.push_back(v);
      const double value = uncertainty_node(matrix, items, candidate);
      if (best < 0 || detail::improves(value, best_value)) {
        best_value = value;
        best = v;
      }
    }
    selected[best] = 1;
    result.nodes.push_back(best);
    result.objective_trace.push_back(best_value);
  }
  return result;
}

/// Greedy edge monitoring with the same per-parent bookkeeping, O(|E|) per
/// iteration. Ties break toward the lexicographically smallest (u, v).
inline EdgeSelection edge_greedy(const TransitionMatrix& matrix,
                                 const ItemDistribution& items, int k) {
  check_dimensions(matrix, items);
  if (k < 0 || k > matrix.edge_count()) throw DataError("budget k out of range");

  const std::vector<Edge> all_edges = matrix.edges();
  std::vector<double> edge_prob(all_edges.size());
  for (std::size_t i = 0; i < all_edges.size(); ++i)
    edge_prob[i] = matrix.probability(all_edges[i].first, all_edges[i].second);

  GreedyState state = GreedyState::init(matrix, items);
  std::vector<char> selected(all_edges.size(), 0);
  EdgeSelection result;

  for (int step = 0; step < k; ++step) {
    std::size_t best = all_edges.size();
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all_edges.size(); ++i) {
      if (selected[i]) continue;
      const int u = all_edges[i].first;
      const double value = detail::snap_to_zero(
          state.current_objective - state.term(items, u) +
          state.term_after(items, u, edge_prob[i]));
      if (best == all_edges.size() || detail::improves(value, best_value)) {
        best_value = value;
        best = i;
      }
    }
    selected[best] = 1;
    state.absorb(all_edges[best].first, edge_prob[best]);
    state.current_objective = best_value;
    result.edges.push_back(all_edges[best]);
    result.objective_trace.push_back(best_value);
  }
  return result;
}

/// Budget-allocation tables for the optimal edge-monitoring dynamic program.
/// `isol[i][m]` is node i's contribution when its m highest-probability
/// outgoing edges are observed; `sol[i][r]` the optimum over nodes i..n-1
/// with budget r; `choice[i][r]` the minimizing m for backtracking.
struct DpTable {
  std::vector<std::vector<double>> isol;
  std::vector<std::vector<double>> sol;
  std::vector<std::vector<int>> choice;
};

namespace detail {

// Outgoing edges sorted by descending probability, ties by child id.
inline std::vector<Link> sorted_row(const TransitionMatrix& matrix, int u) {
  std::vector<Link> row(matrix.row(u).begin(), matrix.row(u).end());
  std::sort(row.begin(), row.end(), [](const Link& a, const Link& b) {
    if (a.p != b.p) return a.p > b.p;
    return a.node < b.node;
  });
  return row;
}

inline std::vector<double> isol_row(const TransitionMatrix& matrix,
                                    const ItemDistribution& items, int u,
                                    int max_m) {
  const std::vector<Link> row = sorted_row(matrix, u);
  const int d = static_cast<int>(row.size());
  const int top = std::min(max_m, d);
  // Suffix sums of p and p^2 after removing the m largest probabilities,
  // evaluated with residual 1 - rho as in uncertainty_edge.
  double s = 0.0, ss = 0.0;
  for (const Link& link : row) {
    s += link.p;
    ss += link.p * link.p;
  }
  std::vector<double> isol(top + 1, 0.0);
  double rho = 0.0;
  for (int m = 0; m <= top; ++m) {
    const double residual = 1.0 - rho;
    isol[m] = residual > kResidualEpsilon ? items[u] * (s - ss / residual) : 0.0;
    if (m < top) {
      rho += row[m].p;
      s -= row[m].p;
      ss -= row[m].p * row[m].p;
    }
  }
  return isol;
}

}  // namespace detail

/// Optimal edge monitoring. Per node only highest-probability prefixes of the
/// outgoing edges need be considered; a dynamic program then allocates the
/// budget across nodes. Ties in the per-cell argmin break toward smaller m,
/// so the returned set can be smaller than k when extra edges would not
/// lower the objective.
inline EdgeSelection edge_dp(const TransitionMatrix& matrix,
                             const ItemDistribution& items, int k) {
  check_dimensions(matrix, items);
  if (k < 0 || k > matrix.edge_count()) throw DataError("budget k out of range");
  const int n = matrix.node_count();

  DpTable table;
  table.isol.resize(n);
  for (int u = 0; u < n; ++u)
    table.isol[u] = detail::isol_row(matrix, items, u, k);

  table.sol.assign(n + 1, std::vector<double>(k + 1, 0.0));
  table.choice.assign(n, std::vector<int>(k + 1, 0));
  for (int i = n - 1; i >= 0; --i) {
    const auto& isol = table.isol[i];
    const int top = static_cast<int>(isol.size()) - 1;
    for (int r = 0; r <= k; ++r) {
      double best = std::numeric_limits<double>::infinity();
      int best_m = 0;
      for (int m = 0; m <= std::min(r, top); ++m) {
        const double value = isol[m] + table.sol[i + 1][r - m];
        if (value < best) {
          best = value;
          best_m = m;
        }
      }
      table.sol[i][r] = best;
      table.choice[i][r] = best_m;
    }
  }

  EdgeSelection result;
  int remaining = k;
  for (int i = 0; i < n; ++i) {
    const int m = table.choice[i][remaining];
    if (m > 0) {
      const std::vector<Link> row = detail::sorted_row(matrix, i);
      for (int j = 0; j < m; ++j) result.edges.emplace_back(i, row[j].node);
    }
    remaining -= m;
  }
  // Any prefix of the set is a subset of the next, so the trace is
  // non-increasing regardless of edge order.
  for (std::size_t t = 1; t <= result.edges.size(); ++t)
    result.objective_trace.push_back(uncertainty_edge(
        matrix, items, std::span<const Edge>(result.edges.data(), t)));
  return result;
}

/// Exact optimum for departure-count monitoring: the objective is separable
/// per node, so the k nodes with the largest c(u) = x(u) sum p(1-p) are
/// optimal. Ties break toward the smaller id.
inline NodeSelection children_topk(const TransitionMatrix& matrix,
                                   const ItemDistribution& items, int k) {
  check_dimensions(matrix, items);
  const int n = matrix.node_count();
  if (k < 0 || k > n) throw DataError("budget k out of range");

  std::vector<double> score(n, 0.0);
  double f0 = 0.0;
  for (int u = 0; u < n; ++u) {
    for (const Link& link : matrix.row(u))
      score[u] += items[u] * link.p * (1.0 - link.p);
    f0 += score[u];
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });

  NodeSelection result;
  double remaining = f0;
  for (int t = 0; t < k; ++t) {
    remaining -= score[order[t]];
    result.nodes.push_back(order[t]);
    result.objective_trace.push_back(std::max(remaining, 0.0));
  }
  return result;
}

enum class NodeObjective { kNode, kChildren };

inline constexpr long long kDefaultBruteForceCap = 2'000'000;

namespace detail {

inline long long combination_count(long long n, long long k, long long cap) {
  long long count = 1;
  for (long long i = 1; i <= k; ++i) {
    count = count * (n - k + i) / i;
    if (count > cap) return cap + 1;
  }
  return count;
}

// Calls visit(combo) for every size-k index subset of [0, n) in
// lexicographic order.
template <typename Visit>
void for_each_combination(int n, int k, Visit visit) {
  std::vector<int> combo(k);
  std::iota(combo.begin(), combo.end(), 0);
  if (k > n) return;
  while (true) {
    visit(combo);
    int i = k - 1;
    while (i >= 0 && combo[i] == n - k + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
}

}  // namespace detail

/// Exhaustive optimum over all node sets of size k. Test oracle only; throws
/// once the number of evaluations would exceed `cap`. Returns the
/// lexicographically smallest optimal set.
inline NodeSelection brute_force_nodes(const TransitionMatrix& matrix,
                                       const ItemDistribution& items, int k,
                                       NodeObjective objective,
                                       long long cap = kDefaultBruteForceCap) {
  check_dimensions(matrix, items);
  const int n = matrix.node_count();
  if (k < 0 || k > n) throw DataError("budget k out of range");
  if (detail::combination_count(n, k, cap) > cap)
    throw DataError("brute-force evaluation cap exceeded");

  auto evaluate = [&](std::span<const int> nodes) {
    return objective == NodeObjective::kNode
               ? uncertainty_node(matrix, items, nodes)
               : uncertainty_children(matrix, items, nodes);
  };

  std::vector<int> best_set;
  double best_value = std::numeric_limits<double>::infinity();
  detail::for_each_combination(n, k, [&](const std::vector<int>& combo) {
    const double value = evaluate(combo);
    if (value < best_value) {
      best_value = value;
      best_set = combo;
    }
  });
  if (k == 0) best_set.clear();

  NodeSelection result;
  result.nodes = best_set;
  for (std::size_t t = 1; t <= best_set.size(); ++t)
    result.objective_trace.push_back(
        evaluate(std::span<const int>(best_set.data(), t)));
  return result;
}

/// Exhaustive optimum over all edge sets of size k. Test oracle only.
inline EdgeSelection brute_force_edges(const TransitionMatrix& matrix,
                                       const ItemDistribution& items, int k,
                                       long long cap = kDefaultBruteForceCap) {
  check_dimensions(matrix, items);
  const int m = matrix.edge_count();
  if (k < 0 || k > m) throw DataError("budget k out of range");
  if (detail::combination_count(m, k, cap) > cap)
    throw DataError("brute-force evaluation cap exceeded");

  const std::vector<Edge> all_edges = matrix.edges();
  std::vector<Edge> set(k);
  std::vector<Edge> best_set;
  double best_value = std::numeric_limits<double>::infinity();
  detail::for_each_combination(m, k, [&](const std::vector<int>& combo) {
    for (int i = 0; i < k; ++i) set[i] = all_edges[combo[i]];
    const double value = uncertainty_edge(matrix, items, set);
    if (value < best_value) {
      best_value = value;
      best_set = set;
    }
  });
  if (k == 0) best_set.clear();

  EdgeSelection result;
  result.edges = best_set;
  for (std::size_t t = 1; t <= best_set.size(); ++t)
    result.objective_trace.push_back(uncertainty_edge(
        matrix, items, std::span<const Edge>(best_set.data(), t)));
  return result;
}

}  // namespace mcm
