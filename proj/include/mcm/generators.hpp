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
#include <set>
#include <string>
#include <vector>

#include "mcm/graph.hpp"
#include "mcm/rng.hpp"

namespace mcm {

enum class GraphKind { kGrid, kGeo, kBa };
enum class ItemScheme { kEgo, kUniform, kDirect, kInverse };

/// Declarative recipe for a synthetic chain and its item placement.
struct GenConfig {
  GraphKind kind = GraphKind::kGrid;
  int rows = 100, cols = 10;     // grid
  int nodes = 1000;              // geo / ba
  double threshold = 0.01;       // geo: connect below this euclidean distance
  int attach = 3;                // ba: out-edges per new node
  std::uint64_t seed = 0;
  double total_items = 0.0;      // 0 means 10 per node
  ItemScheme scheme = ItemScheme::kUniform;
  double ego_fraction = 0.7;

  double resolved_total(int n) const {
    return total_items > 0.0 ? total_items : 10.0 * n;
  }
};

namespace detail {

// Uniform out-probabilities over an adjacency list; isolated nodes get a
// self-loop to keep the row stochastic.
inline TransitionMatrix uniform_rows(std::vector<std::set<int>> adjacency) {
  std::vector<std::vector<Link>> rows(adjacency.size());
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    if (adjacency[u].empty()) adjacency[u].insert(static_cast<int>(u));
    const double p = 1.0 / static_cast<double>(adjacency[u].size());
    for (int v : adjacency[u]) rows[u].push_back({v, p});
  }
  return TransitionMatrix(std::move(rows));
}

}  // namespace detail

/// Planar bidirected grid; interior nodes have in- and out-degree 4.
inline TransitionMatrix grid_graph(int rows, int cols) {
  if (rows < 1 || cols < 1) throw DataError("grid dimensions must be positive");
  const int n = rows * cols;
  std::vector<std::set<int>> adjacency(n);
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (r + 1 < rows) {
        adjacency[id(r, c)].insert(id(r + 1, c));
        adjacency[id(r + 1, c)].insert(id(r, c));
      }
      if (c + 1 < cols) {
        adjacency[id(r, c)].insert(id(r, c + 1));
        adjacency[id(r, c + 1)].insert(id(r, c));
      }
    }
  return detail::uniform_rows(std::move(adjacency));
}

/// Random geometric graph: n seeded uniform points in the unit square,
/// bidirected edges below the distance threshold.
inline TransitionMatrix geo_graph(int n, double threshold, std::uint64_t seed) {
  if (n < 1) throw DataError("node count must be positive");
  if (threshold < 0.0) throw DataError("threshold must be non-negative");
  std::mt19937_64 gen(seed);
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = uniform01(gen);
    py[i] = uniform01(gen);
  }
  std::vector<std::set<int>> adjacency(n);
  const double t2 = threshold * threshold;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = px[i] - px[j], dy = py[i] - py[j];
      if (dx * dx + dy * dy < t2) {
        adjacency[i].insert(j);
        adjacency[j].insert(i);
      }
    }
  return detail::uniform_rows(std::move(adjacency));
}

/// Preferential attachment: starts from a fully interconnected core of
/// attach+1 nodes; each later node gets `attach` out-edges to distinct
/// existing nodes sampled proportionally to current total degree.
inline TransitionMatrix ba_graph(int n, int attach, std::uint64_t seed) {
  if (attach < 1) throw DataError("attachment count must be positive");
  if (n <= attach) throw DataError("need more nodes than attachments");
  std::mt19937_64 gen(seed);
  std::vector<std::set<int>> adjacency(n);
  // Endpoint multiset; each directed edge contributes both endpoints, so
  // sampling from it is sampling proportional to total degree.
  std::vector<int> endpoints;
  const int core = attach + 1;
  for (int u = 0; u < core; ++u)
    for (int v = 0; v < core; ++v)
      if (u != v) {
        adjacency[u].insert(v);
        endpoints.push_back(u);
        endpoints.push_back(v);
      }
  for (int u = core; u < n; ++u) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < attach) {
      const int v = endpoints[uniform_index(gen, endpoints.size())];
      if (v != u) targets.insert(v);
    }
    for (int v : targets) {
      adjacency[u].insert(v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return detail::uniform_rows(std::move(adjacency));
}

inline TransitionMatrix generate_graph(const GenConfig& config) {
  switch (config.kind) {
    case GraphKind::kGrid:
      return grid_graph(config.rows, config.cols);
    case GraphKind::kGeo:
      return geo_graph(config.nodes, config.threshold, config.seed);
    case GraphKind::kBa:
      return ba_graph(config.nodes, config.attach, config.seed);
  }
  throw DataError("unknown graph kind");
}

/// Item placement per the configured scheme. Uniform/Direct/Inverse are
/// deterministic real masses normalized to the total; Ego picks a hub
/// uniformly at random and spreads round(fraction * total) items uniformly
/// over the hub's closed out-neighborhood, the remainder over the rest.
inline ItemDistribution distribute(const TransitionMatrix& matrix,
                                   const GenConfig& config) {
  const int n = matrix.node_count();
  const double total = config.resolved_total(n);
  if (!(total > 0.0)) throw DataError("total items must be positive");
  std::vector<double> x(n, 0.0);

  switch (config.scheme) {
    case ItemScheme::kUniform: {
      for (int u = 0; u < n; ++u) x[u] = total / n;
      break;
    }
    case ItemScheme::kDirect:
    case ItemScheme::kInverse: {
      double weight_sum = 0.0;
      for (int u = 0; u < n; ++u) {
        const double deg = static_cast<double>(matrix.row(u).size());
        x[u] = config.scheme == ItemScheme::kDirect ? deg : 1.0 / deg;
        weight_sum += x[u];
      }
      for (int u = 0; u < n; ++u) x[u] *= total / weight_sum;
      break;
    }
    case ItemScheme::kEgo: {
      if (!(config.ego_fraction > 0.0 && config.ego_fraction < 1.0))
        throw DataError("ego fraction must be in (0,1)");
      std::mt19937_64 gen(split_seed(config.seed, 1));
      const int hub = static_cast<int>(uniform_index(gen, n));
      std::set<int> hood{hub};
      for (const Link& link : matrix.row(hub)) hood.insert(link.node);
      std::vector<int> inside(hood.begin(), hood.end());
      std::vector<int> outside;
      for (int u = 0; u < n; ++u)
        if (!hood.count(u)) outside.push_back(u);
      const long long count = std::llround(total);
      long long in_items = std::llround(config.ego_fraction * count);
      if (outside.empty()) in_items = count;
      for (long long i = 0; i < in_items; ++i)
        x[inside[uniform_index(gen, inside.size())]] += 1.0;
      for (long long i = 0; i < count - in_items; ++i)
        x[outside[uniform_index(gen, outside.size())]] += 1.0;
      break;
    }
  }
  return ItemDistribution(std::move(x));
}

}  // namespace mcm
