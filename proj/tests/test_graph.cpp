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

#include "fixtures.hpp"
#include "mcm/graph.hpp"

using mcm::DataError;
using mcm::Link;
using mcm::TransitionMatrix;

TEST_CASE("rows must be stochastic") {
  CHECK_THROWS_AS(TransitionMatrix({{{0, 0.5}}}), DataError);
  CHECK_THROWS_AS(TransitionMatrix({{{0, 0.7}, {0, 0.3}}}), DataError);
  CHECK_THROWS_AS(TransitionMatrix({{{1, 1.0}}}), DataError);  // out of range
  CHECK_THROWS_AS(TransitionMatrix({{{0, 1.0}, {0, 0.0}}}), DataError);
  CHECK_NOTHROW(TransitionMatrix({{{0, 1.0}}}));
}

TEST_CASE("parent index is the transpose of the rows") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = fixtures::random_instance(gen, 12);
    const auto& m = inst.matrix;
    int transposed_edges = 0;
    for (int v = 0; v < m.node_count(); ++v)
      for (const Link& in : m.parents(v)) {
        CHECK(m.probability(in.node, v) == in.p);
        ++transposed_edges;
      }
    CHECK(transposed_edges == m.edge_count());
  }
}

TEST_CASE("edges are listed lexicographically") {
  const auto m = fixtures::star();
  const std::vector<mcm::Edge> expected{{0, 1}, {0, 2}, {0, 3}, {1, 1}, {2, 2}, {3, 3}};
  CHECK(m.edges() == expected);
}

TEST_CASE("item distributions reject bad masses") {
  CHECK_THROWS_AS(mcm::ItemDistribution({0.0, 0.0}), DataError);
  CHECK_THROWS_AS(mcm::ItemDistribution({-1.0, 2.0}), DataError);
  const mcm::ItemDistribution x({1.5, 0.0, 2.0});
  CHECK(x.total() == 3.5);
  CHECK_FALSE(x.is_integral());
  CHECK(mcm::ItemDistribution({2.0, 1.0}).is_integral());
}

TEST_CASE("dimension mismatch is rejected") {
  const auto m = fixtures::star();
  CHECK_THROWS_AS(
      mcm::check_dimensions(m, mcm::ItemDistribution({1.0, 1.0})), DataError);
}
