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

#include <cmath>
#include <limits>
#include <sstream>

#include "bballoc/errors.hpp"
#include "bballoc/lp_relax.hpp"
#include "bballoc/oracle.hpp"
#include "common.hpp"

using namespace bballoc;
using bballoc::testing::make_hand;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double y_sum(const FractionalSolution& sol, ProductIndex i) {
  double total = 0.0;
  for (const YValue& y : sol.y_star) {
    if (y.product == i) total += y.value;
  }
  return total;
}

LpRelaxOptions with_method(LpMethod method) {
  LpRelaxOptions options;
  options.method = method;
  return options;
}

}  // namespace

TEST_CASE("one slot, one user, one product") {
  const testing::Hand h = make_hand(1, 1, {1}, {{0, 0, 0.6}}, {{0}});
  const LpModel model = build_lp(h.inst, h.mat);
  CHECK(model.num_x == 1);
  CHECK(model.num_y == 1);
  CHECK(model.rows.size() == 3);

  const FractionalSolution sol = solve_lp(model);
  REQUIRE(sol.status == LpStatus::kOptimal);
  REQUIRE(sol.x_star.size() == 1);
  REQUIRE(sol.y_star.size() == 1);
  CHECK(sol.x_star[0].value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.y_star[0].value == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(sol.objective_value == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(lp_upper_bound(sol) == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("budget one picks the better of two slots") {
  const testing::Hand h = make_hand(2, 1, {1}, {{0, 0, 0.6}, {1, 0, 0.8}}, {{0}});
  for (LpMethod method : {LpMethod::kSimplex, LpMethod::kInteriorPoint}) {
    const FractionalSolution sol = solve_lp(build_lp(h.inst, h.mat), with_method(method));
    CHECK(sol.objective_value == doctest::Approx(0.8).epsilon(1e-9));
  }
}

TEST_CASE("two products add two balance rows") {
  const testing::Hand h = make_hand(1, 2, {1, 1}, {{0, 0, 0.5}, {0, 1, 0.5}}, {{0}, {1}});
  const LpModel model = build_lp(h.inst, h.mat);
  CHECK(model.count_rows(LpRowFamily::kBalance) == 2);
  CHECK(build_lp(h.inst, h.mat, kInf).count_rows(LpRowFamily::kBalance) == 0);
}

TEST_CASE("a slot invisible to a product's users has no variable for it") {
  const testing::Hand h = make_hand(2, 2, {1, 1}, {{0, 0, 0.5}, {1, 1, 0.5}}, {{0}, {1}});
  const LpModel model = build_lp(h.inst, h.mat);
  CHECK(model.num_x == 2);
  for (const LpVariable& v : model.variables) {
    if (v.kind == LpVarKind::kSlotProduct) CHECK(v.entity == v.product.value());
  }
}

TEST_CASE("row count is l + |BS| + sum |U_i| + l(l-1)") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = testing::generated(testing::small_params(seed, 4, 3, 1 + seed % 4));
    const LpModel model = build_lp(g.inst, g.mat);
    std::size_t users = 0;
    for (ProductIndex i : index_range<ProductIndex>(g.inst.num_products())) {
      users += g.mat.product_users(i).size();
    }
    const std::size_t l = g.inst.num_products();
    CHECK(model.rows.size() == l + g.inst.num_slots() + users + l * (l - 1));
    CHECK(model.num_y == users);
  }
}

TEST_CASE("theta zero on a symmetric instance equalizes the y sums") {
  const testing::Hand h = make_hand(2, 2, {1, 1}, {{0, 0, 0.7}, {1, 1, 0.7}, {0, 1, 0.2}}, {{0}, {1}}, 0.0);
  const FractionalSolution sol = solve_lp(build_lp(h.inst, h.mat));
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(y_sum(sol, ProductIndex(0)) == doctest::Approx(y_sum(sol, ProductIndex(1))).epsilon(1e-6));
}

TEST_CASE("an empty model has objective zero") {
  Instance inst;
  inst.products.push_back(Product{"p1", 1});
  inst.slots.push_back(BillboardSlot{"b1", "s1", {}, 0, 3600, 1.0});
  const InfluenceMatrix mat = build_influence_matrix(inst);
  const FractionalSolution sol = solve_lp(build_lp(inst, mat));
  CHECK(lp_upper_bound(sol) == 0.0);
}

TEST_CASE("the bound needs an optimal status") {
  FractionalSolution sol;
  sol.status = LpStatus::kIterationLimit;
  CHECK_THROWS_AS(lp_upper_bound(sol), SolverError);
}

TEST_CASE("relaxation bounds the surrogate optimum on tiny instances") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    GenParams p = testing::small_params(seed, 2, 5 - seed % 2, 1 + seed % 2, 12);
    p.alpha = 0.6;
    const auto g = testing::generated(p);
    const LpModel model = build_lp(g.inst, g.mat);
    const FractionalSolution sol = solve_lp(model);
    OracleOptions options;
    options.objective = OracleObjective::kSurrogate;
    const OracleResult best = enumerate_optimal(g.inst, g.mat, options);
    CHECK(lp_upper_bound(sol) >= best.optimum - 1e-6);
    CHECK(max_violation(model, model_values(model, sol)) <= 1e-6);
  }
}

TEST_CASE("one product without balance rows and a full budget covers every user") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    GenParams p = testing::small_params(seed, 3, 3, 1, 15);
    const auto g = testing::generated(p);
    testing::Generated full{g.inst, g.mat};
    full.inst.products[ProductIndex(0)].budget = static_cast<int64_t>(full.inst.num_slots());
    const FractionalSolution sol = solve_lp(build_lp(full.inst, full.mat, kInf));
    std::vector<SlotIndex> all;
    for (SlotIndex s : index_range<SlotIndex>(full.inst.num_slots())) all.push_back(s);
    const auto users = full.mat.product_users(ProductIndex(0));
    CHECK(sol.objective_value ==
          doctest::Approx(approx_influence(full.mat, all, {users.begin(), users.end()})).epsilon(1e-8));
  }
}

TEST_CASE("one product without balance rows matches the surrogate oracle on modular instances") {
  // Every user sees one slot, so the relaxation has an integral optimum.
  const testing::Hand h = make_hand(4, 4, {2}, {{0, 0, 0.9}, {1, 1, 0.4}, {2, 2, 0.7}, {3, 3, 0.2}},
                                    {{0}, {0}, {0}, {0}}, kInf);
  OracleOptions options;
  options.objective = OracleObjective::kSurrogate;
  const double oracle = enumerate_optimal(h.inst, h.mat, options).optimum;
  CHECK(oracle == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(solve_lp(build_lp(h.inst, h.mat)).objective_value == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("re-solving the same model is bit-identical") {
  const auto g = testing::generated(testing::small_params(3, 6, 4, 3, 60));
  const LpModel model = build_lp(g.inst, g.mat);
  for (LpMethod method : {LpMethod::kSimplex, LpMethod::kInteriorPoint}) {
    const FractionalSolution a = solve_lp(model, with_method(method));
    const FractionalSolution b = solve_lp(model, with_method(method));
    REQUIRE(a.x_star.size() == b.x_star.size());
    for (std::size_t k = 0; k < a.x_star.size(); ++k) {
      CHECK(a.x_star[k].slot == b.x_star[k].slot);
      CHECK(a.x_star[k].product == b.x_star[k].product);
      CHECK(a.x_star[k].value == b.x_star[k].value);
    }
    CHECK(a.objective_value == b.objective_value);
  }
}

TEST_CASE("simplex and interior point agree on generated instances") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    GenParams p;
    p.seed = seed;
    p.num_billboards = 12;
    p.num_users = 300;
    p.num_products = 2 + seed % 4;
    p.city_extent = 800.0;
    const auto g = testing::generated(p);
    const LpModel model = build_lp(g.inst, g.mat);
    const FractionalSolution a = solve_lp(model, with_method(LpMethod::kSimplex));
    const FractionalSolution b = solve_lp(model, with_method(LpMethod::kInteriorPoint));
    CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-6));
    CHECK(max_violation(model, model_values(model, a)) <= 1e-6);
    CHECK(max_violation(model, model_values(model, b)) <= 1e-6);
    // The aggregated and the pairwise balance forms describe one polytope.
    LpRelaxOptions pairwise;
    pairwise.aggregate_balance = false;
    pairwise.method = LpMethod::kSimplex;
    CHECK(solve_lp(model, pairwise).objective_value == doctest::Approx(a.objective_value).epsilon(1e-6));
  }
}

TEST_CASE("LP dump names variables by slot, user and product id") {
  const testing::Hand h = make_hand(1, 1, {1}, {{0, 0, 0.6}}, {{0}});
  std::ostringstream out;
  write_lp(out, build_lp(h.inst, h.mat), h.inst);
  const std::string text = out.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("x_s1_p1") != std::string::npos);
  CHECK(text.find("y_u1_p1") != std::string::npos);
  CHECK(text.find("0.6 x_s1_p1") != std::string::npos);
  CHECK(text.rfind("End") != std::string::npos);
}
