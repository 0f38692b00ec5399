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

#include "bballoc/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "bballoc/random.hpp"

namespace bballoc {
namespace {

constexpr uint64_t kRandomStream = 4;

// Deals `slots` (in the given order) one per product in turn, skipping
// products whose budget is full.
Assignments deal_round_robin(const Instance& inst, const std::vector<SlotIndex>& slots) {
  Assignments out(inst.num_products());
  const std::size_t n = inst.num_products();
  std::size_t next = 0;
  for (SlotIndex s : slots) {
    bool placed = false;
    for (std::size_t tries = 0; tries < n && !placed; ++tries) {
      const ProductIndex i(static_cast<int32_t>(next));
      next = (next + 1) % n;
      if (static_cast<int64_t>(out[i].size()) < inst.products[i].budget) {
        out[i].push_back(s);
        placed = true;
      }
    }
    if (!placed) break;
  }
  return out;
}

}  // namespace

Allocation random_solve(const Instance& inst, const InfluenceMatrix& mat, uint64_t seed,
                        const BalanceOptions& options) {
  std::vector<SlotIndex> slots;
  for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) slots.push_back(s);
  Rng rng = Rng::derived(seed, kRandomStream);
  for (std::size_t j = slots.size(); j > 1; --j) std::swap(slots[j - 1], slots[rng.below(j)]);
  Assignments raw = inst.num_products() == 0 ? Assignments{} : deal_round_robin(inst, slots);
  return finish_with_balance(inst, mat, std::move(raw), options, seed);
}

std::string_view to_string(TopkFill fill) {
  return fill == TopkFill::kRoundRobin ? "round-robin" : "sequential";
}

std::optional<TopkFill> parse_topk_fill(std::string_view text) {
  if (text == "sequential") return TopkFill::kSequential;
  if (text == "round-robin") return TopkFill::kRoundRobin;
  return std::nullopt;
}

Allocation topk_solve(const Instance& inst, const InfluenceMatrix& mat,
                      const BalanceOptions& options, TopkFill fill) {
  std::vector<SlotIndex> slots;
  std::vector<double> weight(inst.num_slots());
  for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) {
    slots.push_back(s);
    weight[s.pos()] = mat.slot_weight(s);
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [&](SlotIndex a, SlotIndex b) { return weight[a.pos()] > weight[b.pos()]; });

  Assignments raw(inst.num_products());
  if (fill == TopkFill::kRoundRobin) {
    if (inst.num_products() > 0) raw = deal_round_robin(inst, slots);
  } else {
    std::size_t next = 0;
    for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
      while (static_cast<int64_t>(raw[i].size()) < inst.products[i].budget && next < slots.size()) {
        raw[i].push_back(slots[next++]);
      }
    }
  }
  return finish_with_balance(inst, mat, std::move(raw), options, 0);
}

}  // namespace bballoc
