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

// Reference allocators. Both end with balance_correct.

#ifndef BBALLOC_BASELINES_HPP_
#define BBALLOC_BASELINES_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "bballoc/greedy.hpp"

namespace bballoc {

// Slots in uniformly random order, dealt round-robin to the products that
// still have budget.
Allocation random_solve(const Instance& inst, const InfluenceMatrix& mat, uint64_t seed,
                        const BalanceOptions& options = {});

enum class TopkFill {
  kSequential,  // fill product 1, then product 2, ...
  kRoundRobin,  // deal the sorted slots one per product in turn
};

std::string_view to_string(TopkFill fill);
std::optional<TopkFill> parse_topk_fill(std::string_view text);

// Slots sorted by singleton influence over all users, descending, lowest
// index first on ties.
Allocation topk_solve(const Instance& inst, const InfluenceMatrix& mat,
                      const BalanceOptions& options = {}, TopkFill fill = TopkFill::kSequential);

}  // namespace bballoc

#endif  // BBALLOC_BASELINES_HPP_
