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

#include "bballoc/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bballoc/errors.hpp"
#include "bballoc/random.hpp"

namespace bballoc {
namespace {

constexpr uint64_t kRoundingStream = 1;

// Dense clipped-sum bookkeeping: sigma[i][u] = sum of p(s,u) over S_i.
class ClippedCoverage {
 public:
  ClippedCoverage(const InfluenceMatrix& mat, const Assignments& assignments)
      : mat_(mat), sigma_(mat.num_products() * mat.num_users(), 0.0) {
    for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
      for (SlotIndex s : assignments[i]) add(i, s);
    }
  }

  void add(ProductIndex i, SlotIndex s) { shift(i, s, 1.0); }
  void remove(ProductIndex i, SlotIndex s) { shift(i, s, -1.0); }

  // delta_i(u; s) summed over U_i, for s held by i.
  double loss(ProductIndex i, SlotIndex s) const {
    double total = 0.0;
    for (const SlotUserEntry& e : mat_.slot_users(s)) {
      if (!mat_.interested(e.user, i)) continue;
      const double others = sigma(i, e.user) - e.p;
      total += std::min(e.p, std::max(0.0, 1.0 - others));
    }
    return total;
  }

  // delta_i(u; s) summed over U_i, for s not held by i.
  double gain(ProductIndex i, SlotIndex s) const {
    double total = 0.0;
    for (const SlotUserEntry& e : mat_.slot_users(s)) {
      if (!mat_.interested(e.user, i)) continue;
      total += std::min(e.p, std::max(0.0, 1.0 - sigma(i, e.user)));
    }
    return total;
  }

  // Removal cost used by budget repair: min{p, 1 - yhat} with yhat the
  // clipped coverage including s.
  double budget_loss(ProductIndex i, SlotIndex s) const {
    double total = 0.0;
    for (const SlotUserEntry& e : mat_.slot_users(s)) {
      if (!mat_.interested(e.user, i)) continue;
      const double yhat = std::min(1.0, sigma(i, e.user));
      total += std::min(e.p, 1.0 - yhat);
    }
    return total;
  }

  double estimate(ProductIndex i) const {
    double total = 0.0;
    for (UserIndex u : mat_.product_users(i)) total += std::min(1.0, sigma(i, u));
    return total;
  }

 private:
  double sigma(ProductIndex i, UserIndex u) const {
    return sigma_[i.pos() * mat_.num_users() + u.pos()];
  }
  void shift(ProductIndex i, SlotIndex s, double sign) {
    for (const SlotUserEntry& e : mat_.slot_users(s)) {
      if (mat_.interested(e.user, i)) sigma_[i.pos() * mat_.num_users() + e.user.pos()] += sign * e.p;
    }
  }

  const InfluenceMatrix& mat_;
  std::vector<double> sigma_;
};

double spread(const StrongVector<ProductIndex, double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

}  // namespace

Assignments round_slots(const FractionalSolution& sol, std::size_t num_slots,
                        std::size_t num_products, uint64_t seed) {
  Assignments out(num_products);
  Rng rng = Rng::derived(seed, kRoundingStream);
  std::size_t k = 0;
  for (SlotIndex s : index_range<SlotIndex>(num_slots)) {
    const std::size_t first = k;
    double mass = 0.0;
    while (k < sol.x_star.size() && sol.x_star[k].slot == s) mass += sol.x_star[k++].value;
    const double draw = rng.uniform01();
    const double scale = mass > 1.0 ? 1.0 / mass : 1.0;
    double cumulative = 0.0;
    for (std::size_t e = first; e < k; ++e) {
      cumulative += sol.x_star[e].value * scale;
      if (draw < cumulative) {
        const ProductIndex i = sol.x_star[e].product;
        if (i.pos() >= num_products) throw StructuralError("fractional solution names an unknown product");
        out[i].push_back(s);
        break;
      }
    }
  }
  if (k != sol.x_star.size()) throw StructuralError("fractional solution is not in slot order");
  return out;
}

Assignments budget_repair(Assignments assignments, const InfluenceMatrix& mat,
                          const StrongVector<ProductIndex, int64_t>& budgets) {
  ClippedCoverage cover(mat, assignments);
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
    std::vector<SlotIndex>& held = assignments[i];
    std::sort(held.begin(), held.end());
    while (static_cast<int64_t>(held.size()) > budgets[i]) {
      std::size_t victim = 0;
      double best = cover.budget_loss(i, held[0]);
      for (std::size_t k = 1; k < held.size(); ++k) {
        const double loss = cover.budget_loss(i, held[k]);
        if (loss < best - kInfluenceTolerance) {
          best = loss;
          victim = k;
        }
      }
      cover.remove(i, held[victim]);
      held.erase(held.begin() + static_cast<std::ptrdiff_t>(victim));
    }
  }
  return assignments;
}

StrongVector<ProductIndex, double> estimate_influence(const InfluenceMatrix& mat,
                                                     const Assignments& assignments) {
  ClippedCoverage cover(mat, assignments);
  StrongVector<ProductIndex, double> out(assignments.size());
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) out[i] = cover.estimate(i);
  return out;
}

RepairResult balance_repair(Assignments assignments, const Instance& inst,
                            const InfluenceMatrix& mat, const RoundingConfig& cfg) {
  const double theta = resolve_theta(cfg.theta, inst);
  const int64_t cap = resolve_iteration_cap(cfg.max_balance_iters, inst);
  assignments.resize(inst.num_products());
  for (auto& held : assignments) std::sort(held.begin(), held.end());

  ClippedCoverage cover(mat, assignments);
  RepairResult result;
  result.estimates.resize(assignments.size());
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
    result.estimates[i] = cover.estimate(i);
  }
  MoveGuard guard;
  while (spread(result.estimates) > theta + kInfluenceTolerance && result.iterations < cap) {
    const auto [hi, lo] = extreme_products(result.estimates);
    if (static_cast<int64_t>(assignments[lo].size()) >= inst.products[lo].budget) break;

    std::size_t best = assignments[hi].size();
    double best_delta = 0.0;
    double best_gain = 0.0;
    double best_loss = 0.0;
    for (std::size_t k = 0; k < assignments[hi].size(); ++k) {
      const SlotIndex s = assignments[hi][k];
      if (guard.reverses(s, hi, lo)) continue;
      const double gain = cover.gain(lo, s);
      const double loss = cover.loss(hi, s);
      const double delta = gain - loss;
      if (best == assignments[hi].size() || delta > best_delta + kInfluenceTolerance) {
        best = k;
        best_delta = delta;
        best_gain = gain;
        best_loss = loss;
      }
    }
    if (best == assignments[hi].size() || best_delta <= 0.0) break;

    const SlotIndex s = assignments[hi][best];
    cover.remove(hi, s);
    cover.add(lo, s);
    assignments[hi].erase(assignments[hi].begin() + static_cast<std::ptrdiff_t>(best));
    assignments[lo].insert(std::lower_bound(assignments[lo].begin(), assignments[lo].end(), s), s);
    result.estimates[hi] -= best_loss;
    result.estimates[lo] += best_gain;
    guard.record(s, hi, lo);
    ++result.iterations;
  }

  StrongVector<ProductIndex, double> exact(assignments.size());
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
    exact[i] = product_influence(mat, i, assignments[i]);
  }
  result.satisfied = spread(exact) <= theta + kInfluenceTolerance;
  result.assignments = std::move(assignments);
  return result;
}

Allocation round_and_repair(const Instance& inst, const InfluenceMatrix& mat,
                            const FractionalSolution& sol, const RoundingConfig& cfg,
                            int64_t* repair_iterations) {
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("rounding needs an optimal relaxation, got " + std::string(to_string(sol.status)));
  }
  StrongVector<ProductIndex, int64_t> budgets;
  for (const Product& p : inst.products) budgets.push_back(p.budget);
  Assignments rounded = round_slots(sol, inst.num_slots(), inst.num_products(), cfg.seed);
  rounded = budget_repair(std::move(rounded), mat, budgets);
  RepairResult repaired = balance_repair(std::move(rounded), inst, mat, cfg);
  if (repair_iterations != nullptr) *repair_iterations = repaired.iterations;
  Allocation alloc = finalize_allocation(inst, mat, std::move(repaired.assignments), cfg.seed);
  alloc.balance_satisfied = repaired.satisfied;
  return alloc;
}

LpRrRun lp_rr_run(const Instance& inst, const InfluenceMatrix& mat, const RoundingConfig& cfg,
                  const LpRelaxOptions& lp_options) {
  LpRrRun run;
  const LpModel model = build_lp(inst, mat, resolve_theta(cfg.theta, inst));
  run.lp = solve_lp(model, lp_options);
  run.allocation = round_and_repair(inst, mat, run.lp, cfg, &run.repair_iterations);
  return run;
}

Allocation lp_rr_solve(const Instance& inst, const InfluenceMatrix& mat, const RoundingConfig& cfg) {
  return lp_rr_run(inst, mat, cfg).allocation;
}

}  // namespace bballoc
