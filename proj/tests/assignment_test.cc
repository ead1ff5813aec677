// Copyright 2026 The gridseld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "gridseld/assignment.h"
#include "oracles.h"

namespace gridseld {
namespace {

double cost_of(const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& cost,
               int cols) {
  double total = 0;
  for (auto [r, c] : pairs) total += cost[r * cols + c];
  return total;
}

TEST(Assignment, EmptySides) {
  EXPECT_TRUE(solve_assignment({}, 0, 3).empty());
  EXPECT_TRUE(solve_assignment({}, 2, 0).empty());
}

TEST(Assignment, CrossingConfiguration) {
  // Greedy on the smallest entry would pick (0,0) and pay 9 for (1,1).
  const std::vector<double> cost = {1, 2, 2, 9};
  const auto pairs = solve_assignment(cost, 2, 2);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], std::make_pair(0, 1));
  EXPECT_EQ(pairs[1], std::make_pair(1, 0));
}

TEST(Assignment, MatchesPermutationOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 180);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 6);
    const int cols = 1 + static_cast<int>(rng() % 6);
    std::vector<double> cost(rows * cols);
    for (double& c : cost) c = trial % 5 == 0 ? std::floor(u(rng) / 45) : u(rng);
    const auto pairs = solve_assignment(cost, rows, cols);
    ASSERT_EQ(static_cast<int>(pairs.size()), std::min(rows, cols));
    std::set<int> used_r, used_c;
    for (auto [r, c] : pairs) {
      EXPECT_TRUE(used_r.insert(r).second);
      EXPECT_TRUE(used_c.insert(c).second);
    }
    EXPECT_NEAR(cost_of(pairs, cost, cols), oracle::best_assignment_cost(cost, rows, cols), 1e-9);
  }
}

}  // namespace
}  // namespace gridseld
