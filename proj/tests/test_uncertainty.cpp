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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "mcm/uncertainty.hpp"

using Catch::Matchers::WithinAbs;
using mcm::baseline_uncertainty;
using mcm::Edge;
using mcm::uncertainty_children;
using mcm::uncertainty_edge;
using mcm::uncertainty_node;

namespace {

// All subsets of {0..n-1} up to a size limit.
std::vector<std::vector<int>> subsets(int n, int max_size) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> set;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) set.push_back(i);
    if (static_cast<int>(set.size()) <= max_size) out.push_back(set);
  }
  return out;
}

}  // namespace

TEST_CASE("baseline uncertainty") {
  SECTION("deterministic chain has none") {
    const mcm::TransitionMatrix m({{{1, 1.0}}, {{0, 1.0}}});
    CHECK(baseline_uncertainty(m, mcm::ItemDistribution({3.0, 5.0})) == 0.0);
  }
  SECTION("two-node chain") {
    CHECK_THAT(baseline_uncertainty(fixtures::two_chain(),
                                    mcm::ItemDistribution({2.0, 0.0})),
               WithinAbs(1.0, 1e-12));
  }
  SECTION("star") {
    // 0.25 + 0.21 + 0.16
    CHECK_THAT(baseline_uncertainty(fixtures::star(), fixtures::star_items()),
               WithinAbs(0.62, 1e-12));
  }
}

TEST_CASE("expected items") {
  SECTION("self-loops keep everything in place") {
    const mcm::TransitionMatrix m({{{0, 1.0}}, {{1, 1.0}}});
    const auto z = mcm::expected_items(m, mcm::ItemDistribution({2.0, 7.0}));
    CHECK(z == std::vector<double>{2.0, 7.0});
  }
  SECTION("star routes the hub item") {
    const auto z = mcm::expected_items(fixtures::star(), fixtures::star_items());
    CHECK_THAT(z[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(z[1], WithinAbs(0.5, 1e-12));
    CHECK_THAT(z[2], WithinAbs(0.3, 1e-12));
    CHECK_THAT(z[3], WithinAbs(0.2, 1e-12));
  }
  SECTION("mass is conserved on random chains") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 30; ++trial) {
      const auto inst = fixtures::random_instance(gen, 15);
      const auto z = mcm::expected_items(inst.matrix, inst.items);
      double total = 0.0;
      for (double v : z) total += v;
      CHECK_THAT(total, WithinAbs(inst.items.total(),
                                  1e-9 * inst.items.total()));
    }
  }
}

TEST_CASE("residual probability") {
  const auto m = fixtures::star();
  CHECK(mcm::residual_probability(m, 0, std::vector<int>{}) == 0.0);
  CHECK_THAT(mcm::residual_probability(m, 0, std::vector<int>{1}),
             WithinAbs(0.5, 1e-12));
  CHECK_THAT(mcm::residual_probability(m, 0, std::vector<int>{0, 1, 2, 3}),
             WithinAbs(1.0, 1e-12));
}

TEST_CASE("node monitoring uncertainty") {
  const auto m = fixtures::star();
  const auto x = fixtures::star_items();
  SECTION("empty set reduces to the baseline") {
    CHECK(uncertainty_node(m, x, std::vector<int>{}) ==
          baseline_uncertainty(m, x));
  }
  SECTION("two-node chain becomes certain") {
    CHECK_THAT(uncertainty_node(fixtures::two_chain(),
                                mcm::ItemDistribution({2.0, 0.0}),
                                std::vector<int>{1}),
               WithinAbs(0.0, 1e-12));
  }
  SECTION("star with the heaviest spoke monitored") {
    CHECK_THAT(uncertainty_node(m, x, std::vector<int>{1}),
               WithinAbs(0.24, 1e-12));
  }
  SECTION("monitoring everything removes all uncertainty") {
    CHECK_THAT(uncertainty_node(m, x, std::vector<int>{0, 1, 2, 3}),
               WithinAbs(0.0, 1e-12));
  }
  SECTION("invalid id rejected") {
    CHECK_THROWS_AS(uncertainty_node(m, x, std::vector<int>{9}),
                    mcm::DataError);
  }
}

TEST_CASE("edge monitoring uncertainty") {
  const auto m = fixtures::star();
  const auto x = fixtures::star_items();
  CHECK(uncertainty_edge(m, x, std::vector<Edge>{}) ==
        baseline_uncertainty(m, x));
  CHECK_THAT(uncertainty_edge(m, x, std::vector<Edge>{{0, 1}}),
             WithinAbs(0.24, 1e-12));
  CHECK_THAT(uncertainty_edge(m, x, std::vector<Edge>{{0, 3}}),
             WithinAbs(0.375, 1e-12));
  CHECK_THROWS_AS(uncertainty_edge(m, x, std::vector<Edge>{{1, 0}}),
                  mcm::DataError);
}

TEST_CASE("children monitoring uncertainty") {
  const auto m = fixtures::star();
  const auto x = fixtures::star_items();
  CHECK(uncertainty_children(m, x, std::vector<int>{}) ==
        baseline_uncertainty(m, x));
  CHECK_THAT(uncertainty_children(m, x, std::vector<int>{0}),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(uncertainty_children(m, x, std::vector<int>{2}),
             WithinAbs(0.62, 1e-12));
  CHECK_THAT(uncertainty_children(m, x, std::vector<int>{0, 1, 2, 3}),
             WithinAbs(0.0, 1e-12));
}

TEST_CASE("monitoring never increases uncertainty and is set-monotone") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = fixtures::random_small_instance(gen, 8, 20, 6);
    const auto& m = inst.matrix;
    const auto& x = inst.items;
    const double f0 = baseline_uncertainty(m, x);
    for (const auto& small : subsets(m.node_count(), 2)) {
      const double node_small = uncertainty_node(m, x, small);
      const double kids_small = uncertainty_children(m, x, small);
      CHECK(node_small <= f0 + 1e-12);
      CHECK(kids_small <= f0 + 1e-12);
      // Extend by one node.
      for (int extra = 0; extra < m.node_count(); ++extra) {
        bool inside = false;
        for (int v : small)
          if (v == extra) inside = true;
        if (inside) continue;
        auto larger = small;
        larger.push_back(extra);
        CHECK(uncertainty_node(m, x, larger) <= node_small + 1e-12);
        CHECK(uncertainty_children(m, x, larger) <= kids_small + 1e-12);
      }
    }
    // Edge variant: grow a random edge set one edge at a time.
    const auto edges = m.edges();
    std::vector<Edge> chosen;
    double previous = f0;
    for (int step = 0; step < 3 && step < static_cast<int>(edges.size()); ++step) {
      Edge candidate = edges[mcm::uniform_index(gen, edges.size())];
      bool seen = false;
      for (const Edge& e : chosen)
        if (e == candidate) seen = true;
      if (seen) continue;
      chosen.push_back(candidate);
      const double value = uncertainty_edge(m, x, chosen);
      CHECK(value <= previous + 1e-12);
      previous = value;
    }
  }
}

TEST_CASE("functionals are linear in the item masses") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_instance(gen, 10);
    const double scale = 0.25 + 3.0 * mcm::uniform01(gen);
    std::vector<double> scaled = inst.items.values();
    for (double& v : scaled) v *= scale;
    const mcm::ItemDistribution sx(scaled);
    const std::vector<int> set{0, 1};
    const auto edges = inst.matrix.edges();
    const std::vector<Edge> eset{edges.front()};
    CHECK_THAT(uncertainty_node(inst.matrix, sx, set),
               WithinAbs(scale * uncertainty_node(inst.matrix, inst.items, set),
                         1e-9));
    CHECK_THAT(uncertainty_edge(inst.matrix, sx, eset),
               WithinAbs(scale * uncertainty_edge(inst.matrix, inst.items, eset),
                         1e-9));
    CHECK_THAT(
        uncertainty_children(inst.matrix, sx, set),
        WithinAbs(scale * uncertainty_children(inst.matrix, inst.items, set),
                  1e-9));
  }
}
