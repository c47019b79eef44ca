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

#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <span>
#include <vector>

#include "mcm/graph.hpp"
#include "mcm/rng.hpp"
#include "mcm/uncertainty.hpp"

namespace mcm {

enum class QueryType { kParentTransitions, kNodeItems, kEdgeTransitions,
                       kChildrenTransitions };

/// One realized transition step: per-edge counts (indexed like
/// TransitionMatrix::edges()) and the resulting per-node totals.
struct TransitionOutcome {
  std::vector<long long> edge_counts;
  std::vector<long long> node_totals;
};

namespace detail {

inline std::vector<long long> integer_items(const ItemDistribution& items) {
  if (!items.is_integral())
    throw DataError("simulation requires integer item counts");
  std::vector<long long> counts(items.size());
  for (int u = 0; u < items.size(); ++u)
    counts[u] = std::llround(items[u]);
  return counts;
}

// First stored-edge index of each row, indexing into matrix.edges().
inline std::vector<int> row_offsets(const TransitionMatrix& matrix) {
  std::vector<int> offsets(matrix.node_count() + 1, 0);
  for (int u = 0; u < matrix.node_count(); ++u)
    offsets[u + 1] = offsets[u] + static_cast<int>(matrix.row(u).size());
  return offsets;
}

}  // namespace detail

/// Sample one transition of all items: each node's departures follow a
/// multinomial over its row, drawn by sequential binomial splits so the
/// result depends only on the seed.
inline TransitionOutcome sample_transition(const TransitionMatrix& matrix,
                                           const ItemDistribution& items,
                                           std::mt19937_64& gen) {
  check_dimensions(matrix, items);
  const std::vector<long long> x = detail::integer_items(items);
  TransitionOutcome outcome;
  outcome.edge_counts.reserve(matrix.edge_count());
  outcome.node_totals.assign(matrix.node_count(), 0);
  for (int u = 0; u < matrix.node_count(); ++u) {
    long long remaining = x[u];
    double remaining_p = 1.0;
    const auto row = matrix.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      long long c;
      if (i + 1 == row.size()) {
        c = remaining;
      } else {
        const double q = remaining_p > 0.0 ? row[i].p / remaining_p : 1.0;
        c = binomial_draw(gen, remaining, std::min(q, 1.0));
      }
      outcome.edge_counts.push_back(c);
      outcome.node_totals[row[i].node] += c;
      remaining -= c;
      remaining_p -= row[i].p;
    }
  }
  return outcome;
}

inline TransitionOutcome sample_transition(const TransitionMatrix& matrix,
                                           const ItemDistribution& items,
                                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return sample_transition(matrix, items, gen);
}

struct McEstimate {
  double mean;
  double stderr_;
  long long trials;
};

/// Monte Carlo estimate of the expected uncertainty for a monitored set.
/// Each trial samples an outcome, takes the answer the queries would return
/// and evaluates the exact conditional variance of the unobserved remainder.
/// Total-count queries are rejected: their conditional variance has no
/// closed form per answer, which is what the enumeration oracle is for.
/// Trials are split over a fixed number of blocks with derived seeds and the
/// block statistics merge in index order, so the result is identical for any
/// worker count.
inline McEstimate mc_expected_uncertainty(const TransitionMatrix& matrix,
                                          const ItemDistribution& items,
                                          std::span<const int> nodes,
                                          std::span<const Edge> edges,
                                          QueryType type, long long trials,
                                          std::uint64_t seed,
                                          int workers = 1) {
  check_dimensions(matrix, items);
  if (type == QueryType::kNodeItems)
    throw DataError("total-count queries are validated by enumeration only");
  if (trials <= 0) throw DataError("trial count must be positive");
  detail::integer_items(items);

  const int n = matrix.node_count();
  const auto offsets = detail::row_offsets(matrix);

  // Residual probability and normalized residual variance per source node,
  // plus a flag per stored edge for membership in the monitored set.
  std::vector<double> rho(n, 0.0);
  std::vector<char> observed_edge(matrix.edge_count(), 0);
  if (type == QueryType::kParentTransitions) {
    const auto mask = detail::node_mask(matrix, nodes);
    for (int u = 0; u < n; ++u) {
      const auto row = matrix.row(u);
      for (std::size_t i = 0; i < row.size(); ++i)
        if (mask[row[i].node]) {
          rho[u] += row[i].p;
          observed_edge[offsets[u] + static_cast<int>(i)] = 1;
        }
    }
  } else if (type == QueryType::kEdgeTransitions) {
    for (const Edge& e : edges) {
      if (!matrix.has_edge(e.first, e.second))
        throw DataError("monitored edge is not in the matrix");
      const auto row = matrix.row(e.first);
      for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i].node == e.second) {
          rho[e.first] += row[i].p;
          observed_edge[offsets[e.first] + static_cast<int>(i)] = 1;
        }
    }
  }

  if (type == QueryType::kChildrenTransitions) {
    // The answer removes monitored sources entirely; the conditional
    // variance is the same for every outcome.
    const double value = uncertainty_children(matrix, items, nodes);
    return {value, 0.0, trials};
  }

  // Per-node residual variance factor: sum over unobserved edges of
  // p/(1-rho) (1 - p/(1-rho)).
  std::vector<double> residual_variance(n, 0.0);
  for (int u = 0; u < n; ++u) {
    const double residual = 1.0 - rho[u];
    if (residual <= kResidualEpsilon) continue;
    const auto row = matrix.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (observed_edge[offsets[u] + static_cast<int>(i)]) continue;
      const double q = row[i].p / residual;
      residual_variance[u] += q * (1.0 - q);
    }
  }

  struct Block {
    double sum = 0.0;
    double sum_sq = 0.0;
    long long count = 0;
  };
  const int blocks = static_cast<int>(std::min<long long>(trials, 64));
  auto run_block = [&](int block) {
    Block stats;
    const long long lo = trials * block / blocks;
    const long long hi = trials * (block + 1) / blocks;
    std::mt19937_64 gen(split_seed(seed, static_cast<std::uint64_t>(block)));
    for (long long t = lo; t < hi; ++t) {
      const TransitionOutcome outcome = sample_transition(matrix, items, gen);
      double value = 0.0;
      for (int u = 0; u < n; ++u) {
        if (residual_variance[u] == 0.0) continue;
        long long seen = 0;
        const auto row = matrix.row(u);
        for (std::size_t i = 0; i < row.size(); ++i)
          if (observed_edge[offsets[u] + static_cast<int>(i)])
            seen += outcome.edge_counts[offsets[u] + static_cast<int>(i)];
        const double remaining =
            static_cast<double>(std::llround(items[u]) - seen);
        value += remaining * residual_variance[u];
      }
      stats.sum += value;
      stats.sum_sq += value * value;
      ++stats.count;
    }
    return stats;
  };

  std::vector<Block> results(blocks);
  if (workers > 1) {
    std::vector<std::future<Block>> futures;
    futures.reserve(blocks);
    for (int b = 0; b < blocks; ++b)
      futures.push_back(std::async(std::launch::async, run_block, b));
    for (int b = 0; b < blocks; ++b) results[b] = futures[b].get();
  } else {
    for (int b = 0; b < blocks; ++b) results[b] = run_block(b);
  }

  double sum = 0.0, sum_sq = 0.0;
  for (const Block& block : results) {
    sum += block.sum;
    sum_sq += block.sum_sq;
  }
  const double mean = sum / static_cast<double>(trials);
  const double variance =
      trials > 1
          ? std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(trials - 1))
          : 0.0;
  return {mean, std::sqrt(variance / static_cast<double>(trials)), trials};
}

struct ExhaustiveResult {
  double total;                    // expected conditional uncertainty
  std::vector<double> per_node;    // E[var(Z(v) | answer)] per node
};

inline constexpr long long kDefaultOutcomeCap = 100'000;

namespace detail {

// All ways to split `count` items over `parts` slots, with multinomial
// probabilities taken from `probs`.
inline void compositions(long long count, std::span<const double> probs,
                         std::vector<long long>& current, double prob,
                         std::size_t slot,
                         std::vector<std::pair<std::vector<long long>, double>>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = count;
    out.emplace_back(current, prob * std::pow(probs[slot], count));
    return;
  }
  double coeff = 1.0;
  for (long long c = 0; c <= count; ++c) {
    current[slot] = c;
    compositions(count - c, probs, current,
                 prob * coeff * std::pow(probs[slot], c), slot + 1, out);
    coeff *= static_cast<double>(count - c) / static_cast<double>(c + 1);
  }
}

inline std::vector<std::pair<std::vector<long long>, double>> row_outcomes(
    const TransitionMatrix& matrix, long long count, int u) {
  std::vector<double> probs;
  for (const Link& link : matrix.row(u)) probs.push_back(link.p);
  std::vector<std::pair<std::vector<long long>, double>> out;
  std::vector<long long> current(probs.size(), 0);
  compositions(count, probs, current, 1.0, 0, out);
  return out;
}

}  // namespace detail

/// Exact expected uncertainty by enumerating every joint outcome, grouping by
/// the answer the queries would return, and computing conditional variances
/// within each group. Independent of the closed-form path; handles
/// total-count queries too.
inline ExhaustiveResult exhaustive_expected_uncertainty(
    const TransitionMatrix& matrix, const ItemDistribution& items,
    std::span<const int> nodes, std::span<const Edge> edges, QueryType type,
    long long cap = kDefaultOutcomeCap) {
  check_dimensions(matrix, items);
  const std::vector<long long> x = detail::integer_items(items);
  const int n = matrix.node_count();
  const auto offsets = detail::row_offsets(matrix);

  std::vector<char> node_mask(n, 0);
  for (int v : nodes) {
    if (v < 0 || v >= n) throw DataError("node id out of range");
    node_mask[v] = 1;
  }
  std::vector<char> edge_mask(matrix.edge_count(), 0);
  for (const Edge& e : edges) {
    bool found = false;
    const auto row = matrix.row(e.first);
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i].node == e.second) {
        edge_mask[offsets[e.first] + static_cast<int>(i)] = 1;
        found = true;
      }
    if (!found) throw DataError("monitored edge is not in the matrix");
  }

  // Per-node outcome lists; cap guards the joint product.
  std::vector<std::vector<std::pair<std::vector<long long>, double>>> per_row;
  long long joint = 1;
  for (int u = 0; u < n; ++u) {
    per_row.push_back(detail::row_outcomes(matrix, x[u], u));
    joint *= static_cast<long long>(per_row.back().size());
    if (joint > cap) throw DataError("outcome enumeration cap exceeded");
  }

  // The answer to the queries, as a flat key.
  auto answer_key = [&](const std::vector<long long>& edge_counts,
                        const std::vector<long long>& totals) {
    std::vector<long long> key;
    switch (type) {
      case QueryType::kParentTransitions:
        for (int v = 0; v < n; ++v)
          if (node_mask[v])
            for (const Link& in : matrix.parents(v)) {
              const auto row = matrix.row(in.node);
              for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].node == v)
                  key.push_back(edge_counts[offsets[in.node] + static_cast<int>(i)]);
            }
        break;
      case QueryType::kNodeItems:
        // The uncertainty left by a totals answer is defined as the expected
        // uncertainty over the per-parent breakdowns consistent with it, so
        // each totals group refines into its breakdown groups.
        for (int v = 0; v < n; ++v)
          if (node_mask[v]) key.push_back(totals[v]);
        for (int v = 0; v < n; ++v)
          if (node_mask[v])
            for (const Link& in : matrix.parents(v)) {
              const auto row = matrix.row(in.node);
              for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].node == v)
                  key.push_back(edge_counts[offsets[in.node] + static_cast<int>(i)]);
            }
        break;
      case QueryType::kEdgeTransitions:
        for (int e = 0; e < matrix.edge_count(); ++e)
          if (edge_mask[e]) key.push_back(edge_counts[e]);
        break;
      case QueryType::kChildrenTransitions:
        for (int u = 0; u < n; ++u)
          if (node_mask[u])
            for (int i = offsets[u]; i < offsets[u + 1]; ++i)
              key.push_back(edge_counts[i]);
        break;
    }
    return key;
  };

  struct Group {
    double prob = 0.0;
    std::vector<double> sum;     // E-weighted totals per node
    std::vector<double> sum_sq;  // E-weighted squared totals per node
  };
  std::map<std::vector<long long>, Group> groups;

  std::vector<long long> edge_counts(matrix.edge_count(), 0);
  std::vector<long long> totals(n, 0);
  // Depth-first product over per-node outcomes.
  auto visit = [&](auto&& self, int u, double prob) -> void {
    if (u == n) {
      Group& group = groups[answer_key(edge_counts, totals)];
      if (group.sum.empty()) {
        group.sum.assign(n, 0.0);
        group.sum_sq.assign(n, 0.0);
      }
      group.prob += prob;
      for (int v = 0; v < n; ++v) {
        const double z = static_cast<double>(totals[v]);
        group.sum[v] += prob * z;
        group.sum_sq[v] += prob * z * z;
      }
      return;
    }
    const auto row = matrix.row(u);
    for (const auto& [counts, p] : per_row[u]) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        edge_counts[offsets[u] + static_cast<int>(i)] = counts[i];
        totals[row[i].node] += counts[i];
      }
      self(self, u + 1, prob * p);
      for (std::size_t i = 0; i < row.size(); ++i)
        totals[row[i].node] -= counts[i];
    }
  };
  visit(visit, 0, 1.0);

  ExhaustiveResult result{0.0, std::vector<double>(n, 0.0)};
  for (const auto& [key, group] : groups) {
    if (group.prob <= 0.0) continue;
    for (int v = 0; v < n; ++v) {
      // q * var(Z(v)|A) = sum_sq - sum^2 / q
      const double contribution =
          group.sum_sq[v] - group.sum[v] * group.sum[v] / group.prob;
      result.per_node[v] += contribution;
      result.total += contribution;
    }
  }
  for (double& v : result.per_node) v = std::max(v, 0.0);
  result.total = std::max(result.total, 0.0);
  return result;
}

}  // namespace mcm
