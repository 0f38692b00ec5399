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

// Brute force over every budget-feasible labelling of the slots. Only for
// tiny instances; used as ground truth in tests.

#ifndef BBALLOC_ORACLE_HPP_
#define BBALLOC_ORACLE_HPP_

#include <optional>

#include "bballoc/greedy.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/model.hpp"

namespace bballoc {

enum class OracleObjective {
  // Total exact influence; allocations over the gap threshold are rejected.
  kExact,
  // Best value of the integer program for the allocation's x:
  // sum_i min(C_i, C_min + theta) with C_i the clipped-sum coverage.
  kSurrogate,
};

struct OracleOptions {
  OracleObjective objective = OracleObjective::kExact;
  std::optional<double> theta;  // unset: instance threshold
  double max_assignments = 1e7;
};

struct OracleResult {
  Allocation allocation;
  double optimum = 0.0;
  double assignments_counted = 0.0;  // size of the search space bound
};

// prod_i sum_{j <= k_i} C(|BS|, j); saturates at +inf.
double oracle_search_size(const Instance& inst);

// Slots are labelled slot-major with labels tried in the order (free, 1, ...,
// l), and only strict improvements replace the incumbent, so the first
// optimum in that order wins. In exact mode, when no allocation is balanced
// the result is the best one among those of smallest gap, flagged
// unbalanced. Throws SizeGuardError when the search space is too large.
OracleResult enumerate_optimal(const Instance& inst, const InfluenceMatrix& mat,
                               const OracleOptions& options = {});

// Greedy over every free slot (no sampling), written independently of
// greedy_allocate: gains come from two full influence evaluations.
Assignments greedy_unsampled_allocate(const Instance& inst, const InfluenceMatrix& mat);
Allocation greedy_unsampled(const Instance& inst, const InfluenceMatrix& mat,
                            const BalanceOptions& options = {});

}  // namespace bballoc

#endif  // BBALLOC_ORACLE_HPP_
