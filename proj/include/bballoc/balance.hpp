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

// Pieces shared by the two balance repair loops.

#ifndef BBALLOC_BALANCE_HPP_
#define BBALLOC_BALANCE_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>

#include "bballoc/errors.hpp"
#include "bballoc/model.hpp"

namespace bballoc {

struct BalanceResult {
  Assignments assignments;
  bool satisfied = true;
  int64_t iterations = 0;
};

// Unset theta means the instance threshold.
inline double resolve_theta(const std::optional<double>& theta, const Instance& inst) {
  const double value = theta.value_or(inst.theta);
  if (!(value >= 0.0)) throw DataError("theta must be nonnegative");
  return value;
}

// 0 selects the default cap of 2 |BS| moves.
inline int64_t resolve_iteration_cap(int64_t cap, const Instance& inst) {
  if (cap < 0) throw DataError("max_balance_iters must be positive");
  if (cap > 0) return cap;
  return std::max<int64_t>(1, 2 * static_cast<int64_t>(inst.num_slots()));
}

// Remembers executed (slot, from, to) moves so that none is undone later in
// the same run.
class MoveGuard {
 public:
  void record(SlotIndex s, ProductIndex from, ProductIndex to) { moves_.insert(key(s, from, to)); }
  bool reverses(SlotIndex s, ProductIndex from, ProductIndex to) const {
    return moves_.contains(key(s, to, from));
  }

 private:
  static uint64_t key(SlotIndex s, ProductIndex from, ProductIndex to) {
    return (static_cast<uint64_t>(s.value()) << 32) ^ (static_cast<uint64_t>(from.value()) << 16) ^
           static_cast<uint64_t>(to.value());
  }
  std::unordered_set<uint64_t> moves_;
};

// Lowest-index argmax and argmin of a per-product vector.
inline std::pair<ProductIndex, ProductIndex> extreme_products(
    const StrongVector<ProductIndex, double>& values) {
  ProductIndex hi(0);
  ProductIndex lo(0);
  for (ProductIndex i : index_range<ProductIndex>(values.size())) {
    if (values[i] > values[hi]) hi = i;
    if (values[i] < values[lo]) lo = i;
  }
  return {hi, lo};
}

}  // namespace bballoc

#endif  // BBALLOC_BALANCE_HPP_
