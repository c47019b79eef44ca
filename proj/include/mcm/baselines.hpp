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
#include <deque>
#include <map>
#include <numeric>
#include <vector>

#include "mcm/graph.hpp"
#include "mcm/rng.hpp"
#include "mcm/uncertainty.hpp"

namespace mcm {

/// Nodes sorted by descending score, ties by smaller id.
struct NodeRanking {
  std::vector<int> ids;
  std::vector<double> scores;

  std::vector<int> top(int k) const {
    return {ids.begin(), ids.begin() + std::min<std::size_t>(k, ids.size())};
  }
};

/// Edges sorted by descending score, ties lexicographic.
struct EdgeRanking {
  std::vector<Edge> ids;
  std::vector<double> scores;

  std::vector<Edge> top(int k) const {
    return {ids.begin(), ids.begin() + std::min<std::size_t>(k, ids.size())};
  }
};

namespace detail {

inline NodeRanking rank_nodes(std::vector<double> scores) {
  NodeRanking ranking;
  ranking.ids.resize(scores.size());
  std::iota(ranking.ids.begin(), ranking.ids.end(), 0);
  std::stable_sort(ranking.ids.begin(), ranking.ids.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  ranking.scores.reserve(scores.size());
  for (int id : ranking.ids) ranking.scores.push_back(scores[id]);
  return ranking;
}

inline EdgeRanking rank_edges(const std::vector<Edge>& edges,
                              const std::vector<double>& scores) {
  std::vector<int> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return edges[a] < edges[b];
  });
  EdgeRanking ranking;
  for (int i : order) {
    ranking.ids.push_back(edges[i]);
    ranking.scores.push_back(scores[i]);
  }
  return ranking;
}

}  // namespace detail

inline NodeRanking in_degree(const TransitionMatrix& matrix) {
  std::vector<double> scores(matrix.node_count(), 0.0);
  for (int v = 0; v < matrix.node_count(); ++v)
    scores[v] = static_cast<double>(matrix.parents(v).size());
  return detail::rank_nodes(std::move(scores));
}

inline NodeRanking in_probability(const TransitionMatrix& matrix) {
  std::vector<double> scores(matrix.node_count(), 0.0);
  for (int v = 0; v < matrix.node_count(); ++v)
    for (const Link& in : matrix.parents(v)) scores[v] += in.p;
  return detail::rank_nodes(std::move(scores));
}

namespace detail {

// Brandes' accumulation over unweighted directed shortest paths. Self-loops
// are skipped. Fills node scores and, when edge_scores is non-null, per-edge
// betweenness keyed lexicographically.
inline void brandes(const TransitionMatrix& matrix,
                    std::vector<double>* node_scores,
                    std::map<Edge, double>* edge_scores) {
  const int n = matrix.node_count();
  node_scores->assign(n, 0.0);
  for (int source = 0; source < n; ++source) {
    std::vector<int> order;
    order.reserve(n);
    std::vector<std::vector<int>> preds(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<int> dist(n, -1);
    sigma[source] = 1.0;
    dist[source] = 0;
    std::deque<int> queue{source};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (const Link& link : matrix.row(v)) {
        const int w = link.node;
        if (w == v) continue;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int v : preds[w]) {
        const double share = sigma[v] / sigma[w] * (1.0 + delta[w]);
        delta[v] += share;
        if (edge_scores) (*edge_scores)[{v, w}] += share;
      }
      if (w != source) (*node_scores)[w] += delta[w];
    }
  }
}

}  // namespace detail

inline NodeRanking node_betweenness(const TransitionMatrix& matrix) {
  std::vector<double> scores;
  detail::brandes(matrix, &scores, nullptr);
  return detail::rank_nodes(std::move(scores));
}

inline EdgeRanking edge_betweenness(const TransitionMatrix& matrix) {
  std::vector<double> node_scores;
  std::map<Edge, double> edge_scores;
  detail::brandes(matrix, &node_scores, &edge_scores);
  const std::vector<Edge> edges = matrix.edges();
  std::vector<double> scores;
  scores.reserve(edges.size());
  for (const Edge& e : edges) {
    auto it = edge_scores.find(e);
    scores.push_back(it == edge_scores.end() ? 0.0 : it->second);
  }
  return detail::rank_edges(edges, scores);
}

/// Harmonic closeness on hop distances over out-edges: sum of 1/d(v,u) over
/// reachable u != v. The harmonic form keeps disconnected graphs meaningful;
/// an isolated node scores 0.
inline NodeRanking closeness(const TransitionMatrix& matrix) {
  const int n = matrix.node_count();
  std::vector<double> scores(n, 0.0);
  for (int source = 0; source < n; ++source) {
    std::vector<int> dist(n, -1);
    dist[source] = 0;
    std::deque<int> queue{source};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const Link& link : matrix.row(v)) {
        if (link.node == v || dist[link.node] >= 0) continue;
        dist[link.node] = dist[v] + 1;
        queue.push_back(link.node);
        scores[source] += 1.0 / dist[link.node];
      }
    }
  }
  return detail::rank_nodes(std::move(scores));
}

inline NodeRanking node_num_items(const TransitionMatrix& matrix,
                                  const ItemDistribution& items) {
  check_dimensions(matrix, items);
  return detail::rank_nodes(items.values());
}

/// score(u, v) = x(u) p(u, v), the expected number of items over the edge.
inline EdgeRanking edge_num_items(const TransitionMatrix& matrix,
                                  const ItemDistribution& items) {
  check_dimensions(matrix, items);
  std::vector<Edge> edges = matrix.edges();
  std::vector<double> scores;
  scores.reserve(edges.size());
  for (const Edge& e : edges)
    scores.push_back(items[e.first] * matrix.probability(e.first, e.second));
  return detail::rank_edges(edges, scores);
}

inline EdgeRanking edge_probability(const TransitionMatrix& matrix) {
  std::vector<Edge> edges = matrix.edges();
  std::vector<double> scores;
  scores.reserve(edges.size());
  for (const Edge& e : edges)
    scores.push_back(matrix.probability(e.first, e.second));
  return detail::rank_edges(edges, scores);
}

/// Seed-deterministic uniform sample of k nodes, without replacement.
inline std::vector<int> random_nodes(const TransitionMatrix& matrix,
                                     std::uint64_t seed, int k) {
  const int n = matrix.node_count();
  if (k < 0 || k > n) throw DataError("budget k out of range");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 gen(seed);
  for (int i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + uniform_index(gen, n - i)]);
  pool.resize(k);
  return pool;
}

/// Seed-deterministic uniform sample of k edges, without replacement.
inline std::vector<Edge> random_edges(const TransitionMatrix& matrix,
                                      std::uint64_t seed, int k) {
  std::vector<Edge> pool = matrix.edges();
  const int m = static_cast<int>(pool.size());
  if (k < 0 || k > m) throw DataError("budget k out of range");
  std::mt19937_64 gen(seed);
  for (int i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + uniform_index(gen, m - i)]);
  pool.resize(k);
  return pool;
}

}  // namespace mcm
