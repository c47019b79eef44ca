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

#include <random>
#include <vector>

#include "mcm/graph.hpp"
#include "mcm/rng.hpp"

namespace fixtures {

// Hub with three spokes (p = 0.5, 0.3, 0.2), self-loops on the spokes,
// one item on the hub. F0 = 0.62.
inline mcm::TransitionMatrix star() {
  return mcm::TransitionMatrix({
      {{1, 0.5}, {2, 0.3}, {3, 0.2}},
      {{1, 1.0}},
      {{2, 1.0}},
      {{3, 1.0}},
  });
}

inline mcm::ItemDistribution star_items() {
  return mcm::ItemDistribution({1.0, 0.0, 0.0, 0.0});
}

// Node 0 splits between staying and moving to 1; node 1 absorbs.
inline mcm::TransitionMatrix two_chain() {
  return mcm::TransitionMatrix({
      {{0, 0.5}, {1, 0.5}},
      {{1, 1.0}},
  });
}

struct Instance {
  mcm::TransitionMatrix matrix;
  mcm::ItemDistribution items;
};

// Random chain with random stochastic rows and random non-negative integer
// item counts (at least one positive).
inline Instance random_instance(std::mt19937_64& gen, int max_nodes,
                                int max_out_degree = 3, int max_items = 20) {
  const int n = 2 + static_cast<int>(mcm::uniform_index(gen, max_nodes - 1));
  std::vector<std::vector<mcm::Link>> rows(n);
  for (int u = 0; u < n; ++u) {
    const int degree =
        1 + static_cast<int>(mcm::uniform_index(
                gen, std::min(max_out_degree, n)));
    std::vector<int> children;
    while (static_cast<int>(children.size()) < degree) {
      const int v = static_cast<int>(mcm::uniform_index(gen, n));
      bool seen = false;
      for (int c : children)
        if (c == v) seen = true;
      if (!seen) children.push_back(v);
    }
    std::vector<double> weights(degree);
    double total = 0.0;
    for (double& w : weights) {
      w = 0.05 + mcm::uniform01(gen);
      total += w;
    }
    for (int i = 0; i < degree; ++i)
      rows[u].push_back({children[i], weights[i] / total});
  }
  std::vector<double> x(n, 0.0);
  double mass = 0.0;
  for (int u = 0; u < n; ++u) {
    x[u] = static_cast<double>(mcm::uniform_index(gen, max_items + 1));
    mass += x[u];
  }
  if (mass == 0.0) x[0] = 1.0;
  return {mcm::TransitionMatrix(std::move(rows)),
          mcm::ItemDistribution(std::move(x))};
}

// Variant bounded by total edge count, for brute-force oracles.
inline Instance random_small_instance(std::mt19937_64& gen, int max_nodes,
                                      int max_edges, int max_items) {
  while (true) {
    Instance inst = random_instance(gen, max_nodes, 3, max_items);
    if (inst.matrix.edge_count() <= max_edges) return inst;
  }
}

// Instance where only one node carries items and spreads them; every other
// node is a deterministic self-loop. Used for per-node optimality checks.
inline Instance single_source_instance(std::mt19937_64& gen, int out_degree,
                                       int items_at_source) {
  const int n = out_degree + 1;
  std::vector<std::vector<mcm::Link>> rows(n);
  std::vector<double> weights(out_degree);
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + mcm::uniform01(gen);
    total += w;
  }
  for (int i = 0; i < out_degree; ++i)
    rows[0].push_back({i + 1, weights[i] / total});
  for (int v = 1; v < n; ++v) rows[v].push_back({v, 1.0});
  std::vector<double> x(n, 0.0);
  x[0] = static_cast<double>(items_at_source);
  return {mcm::TransitionMatrix(std::move(rows)),
          mcm::ItemDistribution(std::move(x))};
}

}  // namespace fixtures
