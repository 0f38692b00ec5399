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

#include "bballoc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bballoc/errors.hpp"
#include "bballoc/text.hpp"

namespace bballoc {
namespace {

double clipped_sum(const InfluenceMatrix& mat, ProductIndex i, const std::vector<SlotIndex>& slots) {
  return approx_influence(mat, slots, mat.product_users(i));
}

class Search {
 public:
  Search(const Instance& inst, const InfluenceMatrix& mat, OracleObjective objective, double theta)
      : inst_(inst), mat_(mat), objective_(objective), theta_(theta),
        current_(inst.num_products()), best_(inst.num_products()) {}

  void run() { visit(SlotIndex(0)); }

  bool found() const { return found_; }
  const Assignments& best() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  void visit(SlotIndex s) {
    if (s.pos() == inst_.num_slots()) {
      leaf();
      return;
    }
    SlotIndex next = s;
    ++next;
    visit(next);
    for (ProductIndex i : index_range<ProductIndex>(inst_.num_products())) {
      if (static_cast<int64_t>(current_[i].size()) >= inst_.products[i].budget) continue;
      current_[i].push_back(s);
      visit(next);
      current_[i].pop_back();
    }
  }

  void leaf() {
    const std::size_t n = inst_.num_products();
    if (objective_ == OracleObjective::kSurrogate) {
      double lowest = std::numeric_limits<double>::infinity();
      std::vector<double> cover(n);
      for (ProductIndex i : index_range<ProductIndex>(n)) {
        cover[i.pos()] = clipped_sum(mat_, i, current_[i]);
        lowest = std::min(lowest, cover[i.pos()]);
      }
      double value = 0.0;
      for (double c : cover) value += std::min(c, lowest + theta_);
      offer(value, 0.0);
      return;
    }
    double total = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (ProductIndex i : index_range<ProductIndex>(n)) {
      const double v = exact_influence(mat_, current_[i], mat_.product_users(i));
      total += v;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    offer(total, n == 0 ? 0.0 : hi - lo);
  }

  // Balanced candidates beat unbalanced ones; among unbalanced ones a
  // smaller gap wins, then a larger value.
  void offer(double value, double gap) {
    const bool balanced = gap <= theta_ + kInfluenceTolerance;
    bool better;
    if (!found_) {
      better = true;
    } else if (balanced != best_balanced_) {
      better = balanced;
    } else if (balanced) {
      better = value > best_value_ + kInfluenceTolerance;
    } else if (gap < best_gap_ - kInfluenceTolerance) {
      better = true;
    } else {
      better = gap <= best_gap_ + kInfluenceTolerance && value > best_value_ + kInfluenceTolerance;
    }
    if (!better) return;
    found_ = true;
    best_balanced_ = balanced;
    best_value_ = value;
    best_gap_ = gap;
    best_ = current_;
  }

  const Instance& inst_;
  const InfluenceMatrix& mat_;
  OracleObjective objective_;
  double theta_;
  Assignments current_;
  Assignments best_;
  bool found_ = false;
  bool best_balanced_ = false;
  double best_value_ = 0.0;
  double best_gap_ = 0.0;
};

}  // namespace

double oracle_search_size(const Instance& inst) {
  const double m = static_cast<double>(inst.num_slots());
  double total = 1.0;
  for (const Product& p : inst.products) {
    double sum = 0.0;
    double binom = 1.0;  // C(m, j)
    const int64_t top = std::min<int64_t>(p.budget, static_cast<int64_t>(inst.num_slots()));
    for (int64_t j = 0; j <= top; ++j) {
      if (j > 0) binom = binom * (m - static_cast<double>(j - 1)) / static_cast<double>(j);
      sum += binom;
    }
    total *= sum;
    if (!std::isfinite(total)) return std::numeric_limits<double>::infinity();
  }
  return total;
}

OracleResult enumerate_optimal(const Instance& inst, const InfluenceMatrix& mat,
                               const OracleOptions& options) {
  const double theta = resolve_theta(options.theta, inst);
  OracleResult result;
  result.assignments_counted = oracle_search_size(inst);
  if (result.assignments_counted > options.max_assignments) {
    throw SizeGuardError("exhaustive search over " + format_number(result.assignments_counted) +
                         " labellings exceeds the limit of " +
                         format_number(options.max_assignments));
  }
  Search search(inst, mat, options.objective, theta);
  search.run();
  result.allocation = finalize_allocation(inst, mat, search.best(), 0);
  result.allocation.balance_satisfied = result.allocation.fairness_gap <= theta + kInfluenceTolerance;
  result.optimum = search.best_value();
  return result;
}

Assignments greedy_unsampled_allocate(const Instance& inst, const InfluenceMatrix& mat) {
  Assignments out(inst.num_products());
  std::vector<bool> used(inst.num_slots(), false);
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    const auto users = mat.product_users(i);
    while (static_cast<int64_t>(out[i].size()) < inst.products[i].budget) {
      const double base = exact_influence(mat, out[i], users);
      std::optional<SlotIndex> best;
      double best_gain = 0.0;
      for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) {
        if (used[s.pos()]) continue;
        std::vector<SlotIndex> trial = out[i];
        trial.push_back(s);
        const double gain = exact_influence(mat, trial, users) - base;
        if (!best || gain > best_gain + kInfluenceTolerance) {
          best = s;
          best_gain = gain;
        }
      }
      if (!best) break;
      out[i].push_back(*best);
      used[best->pos()] = true;
    }
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

Allocation greedy_unsampled(const Instance& inst, const InfluenceMatrix& mat,
                            const BalanceOptions& options) {
  return finish_with_balance(inst, mat, greedy_unsampled_allocate(inst, mat), options, 0);
}

}  // namespace bballoc
