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
#include "mcm/simulate.hpp"

using Catch::Matchers::WithinAbs;
using mcm::Edge;
using mcm::QueryType;

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

TEST_CASE("sampled transitions") {
  SECTION("deterministic rows route exactly") {
    const mcm::TransitionMatrix m({{{1, 1.0}}, {{0, 1.0}}});
    const auto outcome =
        mcm::sample_transition(m, mcm::ItemDistribution({4.0, 7.0}), 5);
    CHECK(outcome.node_totals == std::vector<long long>{7, 4});
    CHECK(outcome.edge_counts == std::vector<long long>{4, 7});
  }
  SECTION("counts are conserved") {
    std::mt19937_64 gen(7);
    const auto inst = fixtures::random_instance(gen, 10);
    const auto outcome = mcm::sample_transition(inst.matrix, inst.items, gen);
    long long total = 0;
    for (long long c : outcome.node_totals) total += c;
    CHECK(total == std::llround(inst.items.total()));
  }
  SECTION("empirical edge means match the probabilities") {
    const auto m = fixtures::star();
    const mcm::ItemDistribution x({100.0, 0.0, 0.0, 0.0});
    std::mt19937_64 gen(21);
    const int trials = 2000;
    std::vector<double> mean(m.edge_count(), 0.0);
    for (int t = 0; t < trials; ++t) {
      const auto outcome = mcm::sample_transition(m, x, gen);
      for (int e = 0; e < m.edge_count(); ++e)
        mean[e] += static_cast<double>(outcome.edge_counts[e]) / trials;
    }
    // Row 0 is stored first; edges (0,1), (0,2), (0,3).
    // Binomial stderr over 2000 trials of 100 items is about 0.11.
    CHECK_THAT(mean[0], WithinAbs(50.0, 0.7));
    CHECK_THAT(mean[1], WithinAbs(30.0, 0.7));
    CHECK_THAT(mean[2], WithinAbs(20.0, 0.7));
  }
  SECTION("fractional items rejected") {
    const mcm::TransitionMatrix m({{{0, 1.0}}});
    CHECK_THROWS_AS(
        mcm::sample_transition(m, mcm::ItemDistribution({1.5}), 1),
        mcm::DataError);
  }
}

TEST_CASE("monte carlo estimates") {
  const auto m = fixtures::star();
  const auto x = fixtures::star_items();

  SECTION("empty set returns the baseline exactly") {
    const auto est = mcm::mc_expected_uncertainty(
        m, x, {}, {}, QueryType::kParentTransitions, 100, 3);
    CHECK_THAT(est.mean, WithinAbs(0.62, 1e-12));
    CHECK(est.stderr_ == 0.0);
  }
  SECTION("star with one monitored spoke") {
    const std::vector<int> nodes{1};
    const auto est = mcm::mc_expected_uncertainty(
        m, x, nodes, {}, QueryType::kParentTransitions, 20000, 11);
    CHECK_THAT(est.mean, WithinAbs(0.24, std::max(3 * est.stderr_, 1e-9)));
  }
  SECTION("edge queries") {
    const std::vector<Edge> edges{{0, 1}};
    const auto est = mcm::mc_expected_uncertainty(
        m, x, {}, edges, QueryType::kEdgeTransitions, 20000, 13);
    CHECK_THAT(est.mean, WithinAbs(0.24, std::max(3 * est.stderr_, 1e-9)));
  }
  SECTION("children queries are deterministic") {
    const std::vector<int> nodes{0};
    const auto est = mcm::mc_expected_uncertainty(
        m, x, nodes, {}, QueryType::kChildrenTransitions, 100, 3);
    CHECK(est.mean == 0.0);
    CHECK(est.stderr_ == 0.0);
  }
  SECTION("total-count queries rejected") {
    CHECK_THROWS_AS(mcm::mc_expected_uncertainty(m, x, {}, {},
                                                 QueryType::kNodeItems, 10, 1),
                    mcm::DataError);
  }
  SECTION("worker count does not change the estimate") {
    const std::vector<int> nodes{1};
    const auto serial = mcm::mc_expected_uncertainty(
        m, x, nodes, {}, QueryType::kParentTransitions, 5000, 17, 1);
    const auto parallel = mcm::mc_expected_uncertainty(
        m, x, nodes, {}, QueryType::kParentTransitions, 5000, 17, 8);
    CHECK(serial.mean == parallel.mean);
    CHECK(serial.stderr_ == parallel.stderr_);
  }
}

TEST_CASE("exhaustive enumeration matches the closed forms") {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 25; ++trial) {
    auto inst = fixtures::random_small_instance(gen, 4, 8, 6);
    // round masses to integers, keep them positive somewhere
    std::vector<double> ints(inst.items.size());
    double total = 0.0;
    for (int u = 0; u < inst.items.size(); ++u) {
      ints[u] = std::floor(inst.items[u] / 4.0);
      total += ints[u];
    }
    if (total == 0.0) ints[0] = 2.0;
    const mcm::ItemDistribution x(ints);
    const auto& m = inst.matrix;

    for (const auto& set : subsets(m.node_count(), 2)) {
      const auto pt = mcm::exhaustive_expected_uncertainty(
          m, x, set, {}, QueryType::kParentTransitions);
      CHECK_THAT(pt.total, WithinAbs(mcm::uncertainty_node(m, x, set), 1e-9));

      const auto ct = mcm::exhaustive_expected_uncertainty(
          m, x, set, {}, QueryType::kChildrenTransitions);
      CHECK_THAT(ct.total,
                 WithinAbs(mcm::uncertainty_children(m, x, set), 1e-9));

      // Total-count queries carry the same information as watching every
      // incoming edge of the set in expectation.
      const auto ni = mcm::exhaustive_expected_uncertainty(
          m, x, set, {}, QueryType::kNodeItems);
      CHECK_THAT(ni.total, WithinAbs(pt.total, 1e-12));
    }

    const auto all_edges = m.edges();
    for (std::size_t i = 0; i < all_edges.size() && i < 4; ++i) {
      const std::vector<Edge> eset{all_edges[i]};
      const auto et = mcm::exhaustive_expected_uncertainty(
          m, x, {}, eset, QueryType::kEdgeTransitions);
      CHECK_THAT(et.total, WithinAbs(mcm::uncertainty_edge(m, x, eset), 1e-9));
    }
  }
}

TEST_CASE("law of total variance per node") {
  // Unconditional variance = expected conditional variance plus the variance
  // of the conditional expectation, so per-node conditional terms never
  // exceed the unconditional binomial variance sum.
  std::mt19937_64 gen(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = fixtures::random_small_instance(gen, 3, 6, 4);
    std::vector<double> ints(inst.items.size());
    double total = 0.0;
    for (int u = 0; u < inst.items.size(); ++u) {
      ints[u] = std::floor(inst.items[u] / 5.0);
      total += ints[u];
    }
    if (total == 0.0) ints[0] = 2.0;
    const mcm::ItemDistribution x(ints);
    const auto& m = inst.matrix;
    const auto none = mcm::exhaustive_expected_uncertainty(
        m, x, {}, {}, QueryType::kParentTransitions);
    for (int v = 0; v < m.node_count(); ++v) {
      double unconditional = 0.0;
      for (const mcm::Link& in : m.parents(v))
        unconditional += x[in.node] * in.p * (1.0 - in.p);
      CHECK_THAT(none.per_node[v], WithinAbs(unconditional, 1e-9));
    }
    const std::vector<int> set{0};
    const auto some = mcm::exhaustive_expected_uncertainty(
        m, x, set, {}, QueryType::kParentTransitions);
    for (int v = 0; v < m.node_count(); ++v)
      CHECK(some.per_node[v] <= none.per_node[v] + 1e-9);
  }
}

TEST_CASE("enumeration cap") {
  const auto m = fixtures::star();
  const mcm::ItemDistribution heavy({50.0, 50.0, 50.0, 50.0});
  CHECK_THROWS_AS(
      mcm::exhaustive_expected_uncertainty(m, heavy, {}, {},
                                           QueryType::kParentTransitions, 100),
      mcm::DataError);
}
