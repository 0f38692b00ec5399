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

// Sampled greedy allocation and the exact-influence balance correction that
// the greedy and both baselines finish with.

#ifndef BBALLOC_GREEDY_HPP_
#define BBALLOC_GREEDY_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bballoc/balance.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/model.hpp"

namespace bballoc {

enum class ProductOrder { kDeclared, kShuffle };

std::string_view to_string(ProductOrder order);
std::optional<ProductOrder> parse_product_order(std::string_view text);

struct GreedyConfig {
  double epsilon = 0.1;  // in (0, 1)
  uint64_t seed = 0;
  int64_t max_balance_iters = 0;  // 0: 2 |BS|
  std::optional<double> theta;    // unset: instance threshold
  ProductOrder product_order = ProductOrder::kDeclared;
};

// Candidate sample size: with k = max(1, ceil(0.1 |BS|)),
// r = ceil((|BS| / k) ln(1/epsilon)). Callers cap it at |BS|.
int64_t sample_size(int64_t total_slots, double epsilon);

// Sampled rounds that found no free slot before a product gives up.
inline constexpr int kMaxEmptySamples = 5;

struct GreedyStep {
  ProductIndex product;
  SlotIndex slot;
  double gain;
};

// Fills each product in turn from uniformly drawn candidate samples, always
// taking the candidate with the largest marginal gain (lowest index on ties).
// `trace`, when given, receives every accepted step.
Assignments greedy_allocate(const Instance& inst, const InfluenceMatrix& mat,
                            const GreedyConfig& cfg, std::vector<GreedyStep>* trace = nullptr);

struct BalanceOptions {
  std::optional<double> theta;
  int64_t max_balance_iters = 0;
};

// While the exact influence gap exceeds theta, moves one slot from the
// strongest product p_max to the weakest p_min. Among slots of p_max whose
// move lowers the gap, the one with the largest gain(p_min) - loss(p_max) is
// taken. Stops when no such slot exists, p_min is at its budget, or the move
// cap is reached. A move never undoes an earlier one.
BalanceResult balance_correct(Assignments assignments, const Instance& inst,
                              const InfluenceMatrix& mat, const BalanceOptions& options);

Allocation greedy_solve(const Instance& inst, const InfluenceMatrix& mat, const GreedyConfig& cfg,
                        int64_t* balance_iterations = nullptr);

// Scores `assignments`, stamps `seed`, and reports balance against the given
// threshold. Shared by every solver that ends in balance_correct.
Allocation finish_with_balance(const Instance& inst, const InfluenceMatrix& mat,
                               Assignments assignments, const BalanceOptions& options,
                               uint64_t seed, int64_t* balance_iterations = nullptr);

}  // namespace bballoc

#endif  // BBALLOC_GREEDY_HPP_
