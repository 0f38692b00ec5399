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

// LP relaxation followed by randomized rounding and repair.
//
//   A. every slot independently takes product i with probability x*[s,i]
//      and stays free with the remaining mass;
//   B. products over budget drop their cheapest slots;
//   C. each product is scored with the clipped-sum estimate;
//   D. slots are shifted from the best to the worst product while that pays.

#ifndef BBALLOC_ROUNDING_HPP_
#define BBALLOC_ROUNDING_HPP_

#include <cstdint>
#include <optional>

#include "bballoc/balance.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/lp_relax.hpp"
#include "bballoc/model.hpp"

namespace bballoc {

struct RoundingConfig {
  uint64_t seed = 0;
  int64_t max_balance_iters = 0;  // 0: 2 |BS|
  std::optional<double> theta;    // unset: instance threshold
};

// Phase A. Slots are visited in index order and each consumes exactly one
// uniform draw. A slot whose x* mass exceeds 1 by rounding noise is
// normalized.
Assignments round_slots(const FractionalSolution& sol, std::size_t num_slots,
                        std::size_t num_products, uint64_t seed);

// Phase B. While product i holds more than k_i slots, removes the slot with
// the smallest sum_{u in U_i} min{p(s,u), 1 - yhat[u,i]}, where yhat is the
// clipped coverage of the current set. Ties go to the lowest slot index.
Assignments budget_repair(Assignments assignments, const InfluenceMatrix& mat,
                          const StrongVector<ProductIndex, int64_t>& budgets);

// Phase C: the clipped-sum estimate of every product.
StrongVector<ProductIndex, double> estimate_influence(const InfluenceMatrix& mat,
                                                     const Assignments& assignments);

struct RepairResult : BalanceResult {
  StrongVector<ProductIndex, double> estimates;  // tracked clipped-sum values
};

// Phase D. `satisfied` is decided on the exact influence of the result.
// Moves into a product already at its budget are not considered.
RepairResult balance_repair(Assignments assignments, const Instance& inst,
                            const InfluenceMatrix& mat, const RoundingConfig& cfg);

struct LpRrRun {
  Allocation allocation;
  FractionalSolution lp;
  int64_t repair_iterations = 0;
};

// Full pipeline: relaxation, rounding, both repairs.
LpRrRun lp_rr_run(const Instance& inst, const InfluenceMatrix& mat, const RoundingConfig& cfg,
                  const LpRelaxOptions& lp_options = {});
Allocation lp_rr_solve(const Instance& inst, const InfluenceMatrix& mat, const RoundingConfig& cfg);

// Rounding and repair for an already solved relaxation, so several seeds can
// share one LP solve.
Allocation round_and_repair(const Instance& inst, const InfluenceMatrix& mat,
                            const FractionalSolution& sol, const RoundingConfig& cfg,
                            int64_t* repair_iterations = nullptr);

}  // namespace bballoc

#endif  // BBALLOC_ROUNDING_HPP_
