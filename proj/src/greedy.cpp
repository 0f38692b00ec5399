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

#include "bballoc/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bballoc/errors.hpp"
#include "bballoc/random.hpp"

namespace bballoc {
namespace {

constexpr uint64_t kSampleStream = 2;
constexpr uint64_t kOrderStream = 3;

double spread(const StrongVector<ProductIndex, double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

}  // namespace

std::string_view to_string(ProductOrder order) {
  return order == ProductOrder::kShuffle ? "shuffle" : "declared";
}

std::optional<ProductOrder> parse_product_order(std::string_view text) {
  if (text == "declared") return ProductOrder::kDeclared;
  if (text == "shuffle") return ProductOrder::kShuffle;
  return std::nullopt;
}

int64_t sample_size(int64_t total_slots, double epsilon) {
  if (total_slots < 1) throw DataError("sample size needs at least one slot");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DataError("epsilon must lie in (0, 1)");
  const int64_t k = std::max<int64_t>(1, (total_slots + 9) / 10);
  const double r = std::ceil(static_cast<double>(total_slots) / static_cast<double>(k) *
                             std::log(1.0 / epsilon));
  return std::max<int64_t>(1, static_cast<int64_t>(r));
}

Assignments greedy_allocate(const Instance& inst, const InfluenceMatrix& mat,
                            const GreedyConfig& cfg, std::vector<GreedyStep>* trace) {
  const std::size_t m = inst.num_slots();
  Assignments out(inst.num_products());
  if (m == 0) return out;
  const std::size_t r = static_cast<std::size_t>(
      std::min<int64_t>(sample_size(static_cast<int64_t>(m), cfg.epsilon), static_cast<int64_t>(m)));

  std::vector<ProductIndex> order;
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) order.push_back(i);
  if (cfg.product_order == ProductOrder::kShuffle) {
    Rng shuffler = Rng::derived(cfg.seed, kOrderStream);
    for (std::size_t j = order.size(); j > 1; --j) {
      std::swap(order[j - 1], order[shuffler.below(j)]);
    }
  }

  Rng sampler = Rng::derived(cfg.seed, kSampleStream);
  CoverageState cover(mat);
  std::vector<uint8_t> used(m, 0);
  std::size_t num_used = 0;
  std::vector<int32_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int32_t> candidates;
  candidates.reserve(r);

  for (ProductIndex i : order) {
    int empty_rounds = 0;
    while (static_cast<int64_t>(out[i].size()) < inst.products[i].budget) {
      if (num_used == m) break;
      // Partial Fisher-Yates: perm[0..r) becomes a uniform r-subset.
      for (std::size_t j = 0; j < r; ++j) std::swap(perm[j], perm[j + sampler.below(m - j)]);
      candidates.clear();
      for (std::size_t j = 0; j < r; ++j) {
        if (!used[static_cast<std::size_t>(perm[j])]) candidates.push_back(perm[j]);
      }
      if (candidates.empty()) {
        if (++empty_rounds >= kMaxEmptySamples) break;
        continue;
      }
      empty_rounds = 0;
      std::sort(candidates.begin(), candidates.end());
      SlotIndex best(candidates.front());
      double best_gain = cover.marginal_gain(i, best);
      for (std::size_t j = 1; j < candidates.size(); ++j) {
        const SlotIndex s(candidates[j]);
        const double gain = cover.marginal_gain(i, s);
        if (gain > best_gain + kInfluenceTolerance) {
          best = s;
          best_gain = gain;
        }
      }
      cover.add(i, best);
      out[i].push_back(best);
      used[best.pos()] = 1;
      ++num_used;
      if (trace != nullptr) trace->push_back(GreedyStep{i, best, best_gain});
    }
  }
  for (auto& held : out) std::sort(held.begin(), held.end());
  return out;
}

BalanceResult balance_correct(Assignments assignments, const Instance& inst,
                              const InfluenceMatrix& mat, const BalanceOptions& options) {
  const double theta = resolve_theta(options.theta, inst);
  const int64_t cap = resolve_iteration_cap(options.max_balance_iters, inst);
  assignments.resize(inst.num_products());
  for (auto& held : assignments) std::sort(held.begin(), held.end());

  CoverageState cover(mat);
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
    for (SlotIndex s : assignments[i]) cover.add(i, s);
  }
  StrongVector<ProductIndex, double> value(assignments.size());
  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) value[i] = cover.influence(i);

  BalanceResult result;
  MoveGuard guard;
  while (spread(value) > theta + kInfluenceTolerance && result.iterations < cap) {
    const auto [hi, lo] = extreme_products(value);
    if (static_cast<int64_t>(assignments[lo].size()) >= inst.products[lo].budget) break;

    double rest_max = -std::numeric_limits<double>::infinity();
    double rest_min = std::numeric_limits<double>::infinity();
    for (ProductIndex i : index_range<ProductIndex>(value.size())) {
      if (i == hi || i == lo) continue;
      rest_max = std::max(rest_max, value[i]);
      rest_min = std::min(rest_min, value[i]);
    }
    const double current = value[hi] - value[lo];

    std::size_t best = assignments[hi].size();
    double best_delta = 0.0;
    for (std::size_t k = 0; k < assignments[hi].size(); ++k) {
      const SlotIndex s = assignments[hi][k];
      if (guard.reverses(s, hi, lo)) continue;
      const double gain = cover.marginal_gain(lo, s);
      const double loss = cover.removal_loss(hi, s);
      const double new_hi = value[hi] - loss;
      const double new_lo = value[lo] + gain;
      const double gap = std::max({rest_max, new_hi, new_lo}) - std::min({rest_min, new_hi, new_lo});
      if (gap >= current - kInfluenceTolerance) continue;
      const double delta = gain - loss;
      if (best == assignments[hi].size() || delta > best_delta + kInfluenceTolerance) {
        best = k;
        best_delta = delta;
      }
    }
    if (best == assignments[hi].size()) break;

    const SlotIndex s = assignments[hi][best];
    cover.remove(hi, s);
    cover.add(lo, s);
    assignments[hi].erase(assignments[hi].begin() + static_cast<std::ptrdiff_t>(best));
    assignments[lo].insert(std::lower_bound(assignments[lo].begin(), assignments[lo].end(), s), s);
    value[hi] = cover.influence(hi);
    value[lo] = cover.influence(lo);
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

Allocation finish_with_balance(const Instance& inst, const InfluenceMatrix& mat,
                               Assignments assignments, const BalanceOptions& options,
                               uint64_t seed, int64_t* balance_iterations) {
  BalanceResult balanced = balance_correct(std::move(assignments), inst, mat, options);
  if (balance_iterations != nullptr) *balance_iterations = balanced.iterations;
  Allocation alloc = finalize_allocation(inst, mat, std::move(balanced.assignments), seed);
  alloc.balance_satisfied = balanced.satisfied;
  return alloc;
}

Allocation greedy_solve(const Instance& inst, const InfluenceMatrix& mat, const GreedyConfig& cfg,
                        int64_t* balance_iterations) {
  Assignments raw = greedy_allocate(inst, mat, cfg);
  return finish_with_balance(inst, mat, std::move(raw),
                             BalanceOptions{cfg.theta, cfg.max_balance_iters}, cfg.seed,
                             balance_iterations);
}

}  // namespace bballoc
