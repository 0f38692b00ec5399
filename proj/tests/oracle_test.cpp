// Copyright 2026 The bballoc Authors
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

#include <doctest.h>

#include <limits>

#include "bballoc/errors.hpp"
#include "bballoc/oracle.hpp"
#include "bballoc/runner.hpp"
#include "common.hpp"

using namespace bballoc;
using bballoc::testing::make_hand;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<SlotIndex> slots(std::initializer_list<int> list) {
  std::vector<SlotIndex> v;
  for (int s : list) v.emplace_back(s);
  return v;
}

}  // namespace

TEST_CASE("a single choice") {
  const testing::Hand h = make_hand(1, 1, {1}, {{0, 0, 0.7}}, {{0}}, kInf);
  const OracleResult r = enumerate_optimal(h.inst, h.mat);
  CHECK(r.optimum == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.allocation.assignments[ProductIndex(0)] == slots({0}));
}

TEST_CASE("two half chances on one user") {
  const testing::Hand h = make_hand(2, 1, {2}, {{0, 0, 0.5}, {1, 0, 0.5}}, {{0}});
  CHECK(enumerate_optimal(h.inst, h.mat).optimum == doctest::Approx(0.75).epsilon(1e-12));
  OracleOptions surrogate;
  surrogate.objective = OracleObjective::kSurrogate;
  CHECK(enumerate_optimal(h.inst, h.mat, surrogate).optimum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a symmetric pair at theta zero ends with no gap") {
  const testing::Hand h = make_hand(2, 2, {1, 1}, {{0, 0, 0.6}, {1, 1, 0.6}}, {{0}, {1}}, 0.0);
  const OracleResult r = enumerate_optimal(h.inst, h.mat);
  CHECK(r.allocation.fairness_gap == doctest::Approx(0.0));
  CHECK(r.allocation.balance_satisfied);
  CHECK(r.optimum == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("the empty allocation keeps a balanced optimum in reach") {
  // Only p1 reaches anyone, so every nonempty allocation has a positive gap.
  const testing::Hand h = make_hand(1, 2, {1, 1}, {{0, 0, 0.6}}, {{0}, {1}}, 0.0);
  const OracleResult r = enumerate_optimal(h.inst, h.mat);
  CHECK(r.allocation.balance_satisfied);
  CHECK(r.optimum == 0.0);
  OracleOptions loose;
  loose.theta = kInf;
  CHECK(enumerate_optimal(h.inst, h.mat, loose).optimum == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("ties keep the first optimum in slot-major order") {
  // s1 and s2 reach the same user equally; the budget allows one.
  const testing::Hand h = make_hand(2, 1, {1}, {{0, 0, 0.5}, {1, 0, 0.5}}, {{0}});
  // Labels tried free first, so the last slot is taken before the first.
  CHECK(enumerate_optimal(h.inst, h.mat).allocation.assignments[ProductIndex(0)] == slots({1}));
}

TEST_CASE("search size and the guard") {
  const testing::Hand h = make_hand(4, 1, {2, 1}, {}, {{0}});
  // (1 + 4 + 6) * (1 + 4)
  CHECK(oracle_search_size(h.inst) == 55.0);
  OracleOptions tight;
  tight.max_assignments = 54;
  CHECK_THROWS_AS(enumerate_optimal(h.inst, h.mat, tight), SizeGuardError);
  const auto g = testing::generated(testing::small_params(1, 10, 6, 3));
  CHECK_THROWS_AS(enumerate_optimal(g.inst, g.mat), SizeGuardError);
}

TEST_CASE("unsampled greedy on a modular instance picks the largest singletons") {
  const testing::Hand h = make_hand(5, 5, {3}, {{0, 0, 0.2}, {1, 1, 0.9}, {2, 2, 0.4}, {3, 3, 0.7}, {4, 4, 0.4}},
                                    {{0}, {0}, {0}, {0}, {0}});
  CHECK(greedy_unsampled_allocate(h.inst, h.mat)[ProductIndex(0)] == slots({1, 2, 3}));
}

TEST_CASE("empty instances") {
  const testing::Hand h = make_hand(0, 0, {2}, {}, {});
  CHECK(greedy_unsampled(h.inst, h.mat).assignments[ProductIndex(0)].empty());
  const OracleResult r = enumerate_optimal(h.inst, h.mat);
  CHECK(r.optimum == 0.0);
  CHECK(r.allocation.assignments[ProductIndex(0)].empty());
}

TEST_CASE("the oracle dominates every heuristic on tiny instances") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    GenParams p = testing::small_params(seed, 2, 3 + seed % 3, 1 + seed % 2, 12);
    p.alpha = 0.5;
    const auto g = testing::generated(p);
    REQUIRE(g.inst.num_slots() <= 10);
    const OracleResult balanced = enumerate_optimal(g.inst, g.mat);
    OracleOptions open;
    open.theta = kInf;
    const OracleResult unbounded = enumerate_optimal(g.inst, g.mat, open);
    CHECK(unbounded.optimum >= balanced.optimum - 1e-9);
    for (Algorithm algo : {Algorithm::kLpRr, Algorithm::kGreedy, Algorithm::kRandom, Algorithm::kTopk}) {
      SolveOptions options;
      options.seed = seed;
      const Allocation a = run_solver(g.inst, g.mat, algo, options).allocation;
      const double bound = a.balance_satisfied ? balanced.optimum : unbounded.optimum;
      CHECK(bound >= a.total_influence() - 1e-6);
    }
  }
}
