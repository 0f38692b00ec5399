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

// Acceptance run: one PASS/FAIL line per criterion, exit status is the
// number of failures. Lines starting with "info" are not criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "bballoc/datagen.hpp"
#include "bballoc/greedy.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/lp_relax.hpp"
#include "bballoc/oracle.hpp"
#include "bballoc/random.hpp"
#include "bballoc/rounding.hpp"
#include "bballoc/runner.hpp"
#include "bballoc/sweep.hpp"
#include "common.hpp"

using namespace bballoc;

namespace {

using Clock = std::chrono::steady_clock;

constexpr Algorithm kHeuristics[] = {Algorithm::kLpRr, Algorithm::kGreedy, Algorithm::kRandom,
                                     Algorithm::kTopk};

int failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& text) {
  std::printf("info  %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void feasibility() {
  const auto start = Clock::now();
  Rng rng(1001);
  int runs = 0;
  int bad = 0;
  int unbalanced = 0;
  int64_t min_slots = 1 << 30;
  int64_t max_slots = 0;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    GenParams p;
    p.seed = seed;
    p.num_products = 2 + static_cast<int64_t>(rng.below(4));
    const int64_t hours = 2 + static_cast<int64_t>(rng.below(7));
    const int64_t target = 10 + static_cast<int64_t>(rng.below(184));
    p.num_billboards = (target + hours - 1) / hours;
    p.horizon = hours * 3600;
    p.num_users = 100;
    p.city_extent = 600.0;
    const auto g = testing::generated(p);
    min_slots = std::min<int64_t>(min_slots, g.inst.num_slots());
    max_slots = std::max<int64_t>(max_slots, g.inst.num_slots());
    for (Algorithm algo : kHeuristics) {
      SolveOptions options;
      options.seed = seed;
      const Allocation a = run_solver(g.inst, g.mat, algo, options).allocation;
      const FeasibilityReport r = check_allocation(g.inst, g.mat, a);
      ++runs;
      // Balance may fail only when the solver flags it.
      if (!r.budget_ok || !r.disjoint_ok || r.balance_ok != a.balance_satisfied) ++bad;
      if (!a.balance_satisfied) ++unbalanced;
    }
  }
  const double secs = seconds_since(start);
  report(1, bad == 0 && secs < 60.0,
         fmt("%d runs, |BS| in [%lld, %lld], %d violations, %d flagged best-effort, %.1f s", runs,
             static_cast<long long>(min_slots), static_cast<long long>(max_slots), bad, unbalanced, secs));
}

void oracle_dominance() {
  const auto start = Clock::now();
  int heuristic_bad = 0;
  int lp_bad = 0;
  double worst_heuristic = -1e300;
  double worst_lp = -1e300;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    GenParams p = testing::small_params(seed, 2, 3 + seed % 3, 1 + seed % 2, 12);
    p.alpha = 0.5;
    auto g = testing::generated(p);
    for (Product& prod : g.inst.products) prod.budget = std::min<int64_t>(prod.budget, 3);
    const OracleResult balanced = enumerate_optimal(g.inst, g.mat);
    OracleOptions open;
    open.theta = std::numeric_limits<double>::infinity();
    const OracleResult unbounded = enumerate_optimal(g.inst, g.mat, open);
    for (Algorithm algo : kHeuristics) {
      SolveOptions options;
      options.seed = seed;
      const Allocation a = run_solver(g.inst, g.mat, algo, options).allocation;
      const double bound = a.balance_satisfied ? balanced.optimum : unbounded.optimum;
      worst_heuristic = std::max(worst_heuristic, a.total_influence() - bound);
      if (a.total_influence() > bound + 1e-6) ++heuristic_bad;
    }
    OracleOptions surrogate;
    surrogate.objective = OracleObjective::kSurrogate;
    const double best = enumerate_optimal(g.inst, g.mat, surrogate).optimum;
    const double lp = lp_upper_bound(solve_lp(build_lp(g.inst, g.mat)));
    worst_lp = std::max(worst_lp, best - lp);
    if (lp < best - 1e-6) ++lp_bad;
  }
  const double secs = seconds_since(start);
  report(2, heuristic_bad == 0 && lp_bad == 0 && secs < 120.0,
         fmt("heuristic > optimum: %d (max excess %.3g), LP < surrogate optimum: %d (max shortfall %.3g), "
             "%.1f s",
             heuristic_bad, worst_heuristic, lp_bad, worst_lp, secs));
}

struct LabelTest {
  std::vector<int64_t> counts;
  double max_z = 0.0;
  double p = 0.0;
};

LabelTest label_test(uint64_t first_seed, int trials) {
  const std::vector<double> probs = {0.3, 0.5, 0.2};
  FractionalSolution sol;
  sol.x_star = {XValue{SlotIndex(0), ProductIndex(0), 0.3}, XValue{SlotIndex(0), ProductIndex(1), 0.5}};
  LabelTest t;
  t.counts.assign(3, 0);
  for (int k = 0; k < trials; ++k) {
    const Assignments a = round_slots(sol, 1, 2, first_seed + static_cast<uint64_t>(k));
    ++t.counts[!a[0].empty() ? 0 : !a[1].empty() ? 1 : 2];
  }
  double chi = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double expected = probs[k] * trials;
    const double sigma = std::sqrt(trials * probs[k] * (1.0 - probs[k]));
    t.max_z = std::max(t.max_z, std::abs(t.counts[k] - expected) / sigma);
    chi += (t.counts[k] - expected) * (t.counts[k] - expected) / expected;
  }
  t.p = std::exp(-chi / 2.0);  // two degrees of freedom
  return t;
}

void rounding_distribution() {
  const int trials = 100000;
  const LabelTest t = label_test(0, trials);
  report(3, t.max_z <= 3.0 && t.p > 0.01,
         fmt("seeds 0..99999: counts %lld / %lld / %lld, max |z| %.2f, chi-square p %.4f",
             static_cast<long long>(t.counts[0]), static_cast<long long>(t.counts[1]),
             static_cast<long long>(t.counts[2]), t.max_z, t.p));
  int low = 0;
  std::vector<int64_t> pooled(3, 0);
  for (int block = 1; block <= 10; ++block) {
    const LabelTest b = label_test(static_cast<uint64_t>(block) * trials, trials);
    if (b.max_z > 3.0 || b.p <= 0.01) ++low;
    for (std::size_t k = 0; k < 3; ++k) pooled[k] += b.counts[k];
  }
  info(fmt("criterion 3 calibration: %d of the next 10 seed blocks miss the bounds; pooled 10^6 counts "
           "%lld / %lld / %lld",
           low, static_cast<long long>(pooled[0]), static_cast<long long>(pooled[1]),
           static_cast<long long>(pooled[2])));
}

void formulas() {
  const int64_t r = sample_size(100, 0.1);
  const int64_t demand = raw_demand(1000, 0.05, 1.0);
  const testing::Hand h = testing::make_hand(2, 1, {2}, {{0, 0, 0.6}, {1, 0, 0.7}}, {{0}});
  const std::vector<SlotIndex> both = {SlotIndex(0), SlotIndex(1)};
  const std::vector<UserIndex> users = {UserIndex(0)};
  const double clipped = approx_influence(h.mat, both, users);
  report(4, r == 24 && demand == 50 && std::abs(clipped - 1.0) <= 1e-12,
         fmt("sample_size(100, 0.1) = %lld, raw demand = %lld, clip of 0.6 + 0.7 = %.17g",
             static_cast<long long>(r), static_cast<long long>(demand), clipped));
}

using RowIndex = std::map<std::pair<Algorithm, uint64_t>, const ResultRow*>;

RowIndex index_rows(const std::vector<ResultRow>& rows, double value) {
  RowIndex out;
  for (const ResultRow& row : rows) {
    if (row.value == value && row.error.empty()) out[{row.algorithm, row.instance_seed}] = &row;
  }
  return out;
}

std::vector<uint64_t> seeds_1_to_20() {
  std::vector<uint64_t> seeds;
  for (uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  return seeds;
}

void trends() {
  const auto start = Clock::now();
  SweepSpec spec;
  spec.axis = "n_products";
  spec.values = {5};
  spec.fixed = GenParams::table_preset();
  spec.algorithms.assign(std::begin(kHeuristics), std::end(kHeuristics));
  spec.seeds = seeds_1_to_20();
  const std::vector<ResultRow> rows = run_sweep(spec, jobs());
  const RowIndex by = index_rows(rows, 5);
  const double secs = seconds_since(start);

  auto compare = [&](Algorithm a, Algorithm b, double& mean_a, double& mean_b) {
    int wins = 0;
    mean_a = mean_b = 0.0;
    for (uint64_t seed : spec.seeds) {
      const double x = by.at({a, seed})->total_influence;
      const double y = by.at({b, seed})->total_influence;
      mean_a += x / 20.0;
      mean_b += y / 20.0;
      if (x >= y) ++wins;
    }
    return wins;
  };
  double lp = 0, greedy = 0, topk = 0, random = 0;
  const int lp_wins = compare(Algorithm::kLpRr, Algorithm::kGreedy, lp, greedy);
  const int topk_wins = compare(Algorithm::kTopk, Algorithm::kRandom, topk, random);
  const bool pass = by.size() == 80 && lp >= greedy && topk >= random && lp_wins >= 16 &&
                    topk_wins >= 16 && secs < 600.0;
  report(5, pass,
         fmt("|BS| = %lld; mean LP+RR %.2f vs Greedy %.2f (%d/20 seeds); mean Top-k %.2f vs Random %.2f "
             "(%d/20 seeds); %.1f s",
             static_cast<long long>(rows.front().num_slots), lp, greedy, lp_wins, topk, random, topk_wins,
             secs));

  // Same instances, Top-k dealing slots round-robin instead.
  int rr_wins = 0;
  double rr_mean = 0.0;
  for (uint64_t seed : spec.seeds) {
    GenParams p = spec.fixed;
    p.seed = seed;
    const auto g = testing::generated(p);
    SolveOptions options;
    options.seed = seed;
    options.topk_fill = TopkFill::kRoundRobin;
    const double x = run_solver(g.inst, g.mat, Algorithm::kTopk, options).allocation.total_influence();
    rr_mean += x / 20.0;
    if (x >= by.at({Algorithm::kRandom, seed})->total_influence) ++rr_wins;
  }
  info(fmt("criterion 5 with round-robin Top-k: mean %.2f vs Random %.2f (%d/20 seeds)", rr_mean, random,
           rr_wins));
}

void theta_monotonicity() {
  const auto start = Clock::now();
  SweepSpec spec;
  spec.axis = "theta";
  spec.values = {0.02, 0.05, 0.1, 0.2};
  spec.fixed = GenParams::table_preset();
  spec.algorithms.assign(std::begin(kHeuristics), std::end(kHeuristics));
  spec.seeds = seeds_1_to_20();
  const std::vector<ResultRow> rows = run_sweep(spec, jobs());
  const PlotTable table = summarize(rows, "fairness_gap");

  int steps = 0;
  int nondecreasing = 0;
  std::string means;
  const PlotSeries* lp = nullptr;
  for (const PlotSeries& s : table.series) {
    if (s.name == to_string(Algorithm::kLpRr)) lp = &s;
    means += " " + s.name + "[";
    for (std::size_t k = 0; k < s.mean.size(); ++k) {
      means += fmt(k == 0 ? "%.3g" : " %.3g", s.mean[k]);
      if (k > 0) {
        ++steps;
        if (s.mean[k] >= s.mean[k - 1]) ++nondecreasing;
      }
    }
    means += "]";
  }
  int lowest = 0;
  for (std::size_t k = 0; k < table.x.size(); ++k) {
    bool best = true;
    for (const PlotSeries& s : table.series) {
      if (&s != lp && s.mean[k] < lp->mean[k]) best = false;
    }
    if (best) ++lowest;
  }
  const double secs = seconds_since(start);
  const bool pass = steps == 12 && nondecreasing >= 0.8 * steps && lowest >= 0.8 * table.x.size();
  report(6, pass,
         fmt("gap nondecreasing in %d/%d adjacent steps; LP+RR lowest mean gap at %d/%zu thetas; %.1f s", nondecreasing,
             steps, lowest, table.x.size(), secs));
  info("criterion 6 mean gaps at theta 0.02 0.05 0.1 0.2:" + means);
}

testing::Hand random_hand(Rng& rng, int slots, int users) {
  std::vector<testing::Entry> entries;
  for (int s = 0; s < slots; ++s) {
    for (int u = 0; u < users; ++u) {
      const double r = rng.uniform01();
      if (r < 0.25) entries.push_back({s, u, r < 0.01 ? 1.0 : rng.uniform(0.01, 0.95)});
    }
  }
  std::vector<std::vector<int>> interests(users);
  for (int u = 0; u < users; ++u) interests[u] = u % 3 == 0 ? std::vector<int>{0, 1} : std::vector<int>{u % 2};
  return testing::make_hand(slots, users, {slots, slots}, entries, interests);
}

void numerical_consistency() {
  Rng rng(707);
  const testing::Hand h = random_hand(rng, 40, 60);
  CoverageState state(h.mat);
  std::vector<std::vector<SlotIndex>> held(2);
  double worst_state = 0.0;
  double worst_gain = 0.0;
  for (int step = 0; step < 1000; ++step) {
    const ProductIndex i(static_cast<int32_t>(rng.below(2)));
    const SlotIndex s(static_cast<int32_t>(rng.below(40)));
    auto& set = held[i.pos()];
    auto it = std::find(set.begin(), set.end(), s);
    const double before = product_influence(h.mat, i, set);
    if (it == set.end()) {
      std::vector<SlotIndex> bigger = set;
      bigger.push_back(s);
      worst_gain = std::max(worst_gain,
                            std::abs(state.marginal_gain(i, s) - (product_influence(h.mat, i, bigger) - before)));
      state.add(i, s);
      set.push_back(s);
    } else {
      state.remove(i, s);
      set.erase(it);
    }
  }
  for (ProductIndex i : index_range<ProductIndex>(2)) {
    worst_state = std::max(worst_state, std::abs(state.influence(i) - product_influence(h.mat, i, held[i.pos()])));
  }
  // A further 1000 gain queries on the final state.
  for (int q = 0; q < 1000; ++q) {
    const ProductIndex i(static_cast<int32_t>(rng.below(2)));
    const SlotIndex s(static_cast<int32_t>(rng.below(40)));
    const auto& set = held[i.pos()];
    if (std::find(set.begin(), set.end(), s) != set.end()) continue;
    std::vector<SlotIndex> bigger = set;
    bigger.push_back(s);
    worst_gain = std::max(worst_gain, std::abs(state.marginal_gain(i, s) -
                                               (product_influence(h.mat, i, bigger) - product_influence(h.mat, i, set))));
  }
  report(7, worst_state <= 1e-6 && worst_gain <= 1e-9,
         fmt("state drift %.3g after 1000 mutations, worst gain mismatch %.3g", worst_state, worst_gain));
}

void scale_smoke() {
  GenParams p;
  p.seed = 1;
  p.num_billboards = 250;
  p.horizon = 20 * 3600;
  p.num_users = 2000;
  p.num_products = 20;
  const auto build_start = Clock::now();
  const auto g = testing::generated(p);
  const double build_secs = seconds_since(build_start);
  SolveOptions options;
  options.seed = 1;
  const SolveOutcome lp = run_solver(g.inst, g.mat, Algorithm::kLpRr, options);
  const SolveOutcome greedy = run_solver(g.inst, g.mat, Algorithm::kGreedy, options);
  const bool feasible = check_allocation(g.inst, g.mat, lp.allocation).budget_ok &&
                        check_allocation(g.inst, g.mat, greedy.allocation).budget_ok;
  const double total = build_secs + (lp.wall_ms + greedy.wall_ms) / 1000.0;
  report(8, feasible && total < 300.0 && lp.wall_ms > greedy.wall_ms,
         fmt("|BS| = %zu, |U| = 2000, l = 20: LP+RR %.1f s, Greedy %.3f s, instance build %.1f s",
             g.inst.num_slots(), lp.wall_ms / 1000.0, greedy.wall_ms / 1000.0, build_secs));
}

}  // namespace

int main() {
  feasibility();
  oracle_dominance();
  rounding_distribution();
  formulas();
  trends();
  theta_monotonicity();
  numerical_consistency();
  scale_smoke();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
