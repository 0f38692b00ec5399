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

#include <array>
#include <cmath>
#include <limits>

#include "bballoc/rounding.hpp"
#include "common.hpp"

using namespace bballoc;
using bballoc::testing::make_hand;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FractionalSolution one_slot(std::initializer_list<double> masses) {
  FractionalSolution sol;
  int32_t i = 0;
  for (double m : masses) {
    if (m > 0.0) sol.x_star.push_back(XValue{SlotIndex(0), ProductIndex(i), m});
    ++i;
  }
  return sol;
}

// Label counts (index l = free) over `trials` seeds for a single slot.
std::vector<int64_t> label_counts(const FractionalSolution& sol, std::size_t products, int trials) {
  std::vector<int64_t> counts(products + 1, 0);
  for (int seed = 0; seed < trials; ++seed) {
    const Assignments a = round_slots(sol, 1, products, static_cast<uint64_t>(seed));
    std::size_t label = products;
    for (std::size_t i = 0; i < products; ++i) {
      if (!a[i].empty()) label = i;
    }
    ++counts[label];
  }
  return counts;
}

double chi_square(const std::vector<int64_t>& counts, const std::vector<double>& probs, int trials) {
  double chi = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double expected = probs[k] * trials;
    chi += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  return chi;
}

Assignments sets(std::initializer_list<std::initializer_list<int>> lists) {
  Assignments a;
  for (auto list : lists) {
    std::vector<SlotIndex> v;
    for (int s : list) v.emplace_back(s);
    a.push_back(v);
  }
  return a;
}

// p1 users u1, u2; p2 users u3, u4. p1 holds s1 (u1: 0.6) and s2 (u1: 0.3,
// u3: 0.5); p2 holds s3 (u4: 0.1). Estimates {0.9, 0.1}; moving s2 gains 0.5
// at p2 and loses 0.3 at p1.
testing::Hand shift_instance() {
  return make_hand(3, 4, {2, 2}, {{0, 0, 0.6}, {1, 0, 0.3}, {1, 2, 0.5}, {2, 3, 0.1}},
                   {{0}, {0}, {1}, {1}}, 0.05);
}

}  // namespace

TEST_CASE("degenerate rounding distributions") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Assignments a = round_slots(one_slot({1.0}), 1, 2, seed);
    CHECK(a[ProductIndex(0)] == std::vector<SlotIndex>{SlotIndex(0)});
    CHECK(a[ProductIndex(1)].empty());
    const Assignments z = round_slots(FractionalSolution{}, 3, 2, seed);
    CHECK(z[ProductIndex(0)].empty());
    CHECK(z[ProductIndex(1)].empty());
  }
}

TEST_CASE("an even split over 10^4 seeds passes a chi-square test") {
  const int trials = 10000;
  const auto counts = label_counts(one_slot({0.5, 0.5}), 2, trials);
  CHECK(counts[2] == 0);
  const std::vector<int64_t> two = {counts[0], counts[1]};
  const double chi = chi_square(two, {0.5, 0.5}, trials);
  // One degree of freedom.
  CHECK(std::erfc(std::sqrt(chi / 2.0)) > 0.01);
}

TEST_CASE("labels 0.3 / 0.5 / free 0.2 are calibrated over ten blocks of 10^5 seeds") {
  // A single block fails a 1% test one time in a hundred; across ten
  // independent blocks at most two may, and the pooled counts must pass.
  const int trials = 100000;
  const std::vector<double> probs = {0.3, 0.5, 0.2};
  const FractionalSolution sol = one_slot({0.3, 0.5});
  std::vector<int64_t> pooled(3, 0);
  int low_p = 0;
  for (int block = 0; block < 10; ++block) {
    std::vector<int64_t> counts(3, 0);
    for (int t = 0; t < trials; ++t) {
      const Assignments a = round_slots(sol, 1, 2, static_cast<uint64_t>(block) * trials + t);
      ++counts[!a[0].empty() ? 0 : !a[1].empty() ? 1 : 2];
    }
    // Two degrees of freedom: p = exp(-chi / 2).
    if (std::exp(-chi_square(counts, probs, trials) / 2.0) <= 0.01) ++low_p;
    for (std::size_t k = 0; k < 3; ++k) pooled[k] += counts[k];
  }
  CHECK(low_p <= 2);
  const int total = 10 * trials;
  for (std::size_t k = 0; k < 3; ++k) {
    const double sigma = std::sqrt(total * probs[k] * (1.0 - probs[k]));
    CHECK(std::abs(pooled[k] - total * probs[k]) <= 3.0 * sigma);
  }
  CHECK(std::exp(-chi_square(pooled, probs, total) / 2.0) > 0.01);
}

TEST_CASE("rounding is reproducible and normalizes tiny excess mass") {
  FractionalSolution sol = one_slot({0.6, 0.4 + 1e-9});
  const Assignments a = round_slots(sol, 1, 2, 99);
  const Assignments b = round_slots(sol, 1, 2, 99);
  CHECK(a == b);
  const auto counts = label_counts(sol, 2, 2000);
  CHECK(counts[2] == 0);
}

TEST_CASE("budget repair drops the cheapest slot") {
  // s1 loses 0.2; s2 covers two users at 0.35 each and loses 0.7.
  const testing::Hand h = make_hand(2, 3, {1}, {{0, 0, 0.2}, {1, 1, 0.35}, {1, 2, 0.35}}, {{0}, {0}, {0}});
  const StrongVector<ProductIndex, int64_t> budgets = {1};
  CHECK(budget_repair(sets({{0, 1}}), h.mat, budgets) == sets({{1}}));
  // Within budget: unchanged.
  const StrongVector<ProductIndex, int64_t> roomy = {2};
  CHECK(budget_repair(sets({{0, 1}}), h.mat, roomy) == sets({{0, 1}}));
}

TEST_CASE("budget repair breaks loss ties by lowest slot index") {
  const testing::Hand h = make_hand(3, 3, {1}, {{0, 0, 0.4}, {1, 1, 0.4}, {2, 2, 0.4}}, {{0}, {0}, {0}});
  const StrongVector<ProductIndex, int64_t> budgets = {1};
  CHECK(budget_repair(sets({{0, 1, 2}}), h.mat, budgets) == sets({{2}}));
}

TEST_CASE("budget repair uses the clipped coverage of the current set") {
  // s1 and s2 both cover u1 (0.7 each): each one's loss is min(0.7, 1 - 1) = 0.
  // s3 covers u2 alone at 0.1. The zero-loss s1 goes first, then s2 (now 0.3
  // loss after the clip loosens) competes with s3 (0.1): s3 goes.
  const testing::Hand h = make_hand(3, 2, {1}, {{0, 0, 0.7}, {1, 0, 0.7}, {2, 1, 0.1}}, {{0}, {0}});
  const StrongVector<ProductIndex, int64_t> budgets = {1};
  CHECK(budget_repair(sets({{0, 1, 2}}), h.mat, budgets) == sets({{1}}));
}

TEST_CASE("estimates are clipped sums") {
  const testing::Hand h = shift_instance();
  const auto est = estimate_influence(h.mat, sets({{0, 1}, {2}}));
  CHECK(est[ProductIndex(0)] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(est[ProductIndex(1)] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("balance repair shifts the slot with the best gain minus loss") {
  const testing::Hand h = shift_instance();
  const RepairResult r = balance_repair(sets({{0, 1}, {2}}), h.inst, h.mat, RoundingConfig{});
  CHECK(r.assignments == sets({{0}, {1, 2}}));
  CHECK(r.iterations == 1);
  CHECK(r.estimates[ProductIndex(0)] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.estimates[ProductIndex(1)] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.satisfied);
}

TEST_CASE("balance repair leaves a balanced allocation alone") {
  const testing::Hand h = shift_instance();
  const RepairResult r = balance_repair(sets({{0}, {1, 2}}), h.inst, h.mat, RoundingConfig{});
  CHECK(r.assignments == sets({{0}, {1, 2}}));
  CHECK(r.iterations == 0);
  CHECK(r.satisfied);
}

TEST_CASE("balance repair stops when no shift pays") {
  // p1 holds s1 (0.9 on its own user); p2 gains nothing from it.
  const testing::Hand h = make_hand(2, 2, {2, 2}, {{0, 0, 0.9}, {1, 1, 0.1}}, {{0}, {1}}, 0.05);
  const RepairResult r = balance_repair(sets({{0}, {1}}), h.inst, h.mat, RoundingConfig{});
  CHECK(r.iterations == 0);
  CHECK_FALSE(r.satisfied);
  CHECK(r.assignments == sets({{0}, {1}}));
}

TEST_CASE("balance repair never fills a product past its budget") {
  testing::Hand h = shift_instance();
  h.inst.products[ProductIndex(1)].budget = 1;
  const RepairResult r = balance_repair(sets({{0, 1}, {2}}), h.inst, h.mat, RoundingConfig{});
  CHECK(r.iterations == 0);
  CHECK(r.assignments == sets({{0, 1}, {2}}));
}

TEST_CASE("tracked estimates match recomputation") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = testing::generated(testing::small_params(seed, 5, 4, 3, 40));
    RoundingConfig cfg;
    cfg.seed = seed;
    const LpRrRun run = lp_rr_run(g.inst, g.mat, cfg);
    Assignments raw = round_slots(run.lp, g.inst.num_slots(), g.inst.num_products(), seed);
    StrongVector<ProductIndex, int64_t> budgets;
    for (const Product& p : g.inst.products) budgets.push_back(p.budget);
    const Assignments repaired = budget_repair(raw, g.mat, budgets);
    for (ProductIndex i : index_range<ProductIndex>(g.inst.num_products())) {
      CHECK(repaired[i].size() <= raw[i].size());
      CHECK(static_cast<int64_t>(repaired[i].size()) <= budgets[i]);
    }
    const RepairResult r = balance_repair(repaired, g.inst, g.mat, cfg);
    const auto fresh = estimate_influence(g.mat, r.assignments);
    for (ProductIndex i : index_range<ProductIndex>(g.inst.num_products())) {
      CHECK(std::abs(r.estimates[i] - fresh[i]) <= 1e-9);
    }
    CHECK(r.iterations <= 2 * static_cast<int64_t>(g.inst.num_slots()));
  }
}

TEST_CASE("single product with a full budget takes every useful slot") {
  const testing::Hand h = make_hand(4, 4, {4}, {{0, 0, 0.9}, {1, 1, 0.4}, {2, 2, 0.7}}, {{0}, {0}, {0}, {0}});
  const Allocation a = lp_rr_solve(h.inst, h.mat, RoundingConfig{});
  CHECK(a.assignments[ProductIndex(0)] == std::vector<SlotIndex>{SlotIndex(0), SlotIndex(1), SlotIndex(2)});
  CHECK(a.per_product_influence[ProductIndex(0)] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("infinite theta makes balance repair a no-op") {
  const testing::Hand h = shift_instance();
  RoundingConfig cfg;
  cfg.theta = kInf;
  const RepairResult r = balance_repair(sets({{0, 1}, {2}}), h.inst, h.mat, cfg);
  CHECK(r.iterations == 0);
  CHECK(r.satisfied);
}

TEST_CASE("six slots, two products, 50 seeds: always budget feasible and disjoint") {
  const auto g = testing::generated(testing::small_params(8, 2, 3, 2, 20));
  REQUIRE(g.inst.num_slots() == 6);
  const FractionalSolution lp = solve_lp(build_lp(g.inst, g.mat));
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RoundingConfig cfg;
    cfg.seed = seed;
    const Allocation a = round_and_repair(g.inst, g.mat, lp, cfg);
    const FeasibilityReport r = check_allocation(g.inst, g.mat, a);
    CHECK(r.hard_constraints_ok());
    CHECK(a.seed == seed);
    CHECK(a.balance_satisfied == r.balance_ok);
  }
}

TEST_CASE("lp-rr is deterministic for a seed") {
  const auto g = testing::generated(testing::small_params(4, 6, 4, 3, 50));
  RoundingConfig cfg;
  cfg.seed = 17;
  const Allocation a = lp_rr_solve(g.inst, g.mat, cfg);
  const Allocation b = lp_rr_solve(g.inst, g.mat, cfg);
  CHECK(a.assignments == b.assignments);
  CHECK(a.total_influence() == b.total_influence());
}
