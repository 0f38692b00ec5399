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

// Builders shared by the test suites.

#ifndef BBALLOC_TESTS_COMMON_HPP_
#define BBALLOC_TESTS_COMMON_HPP_

#include <string>
#include <vector>

#include "bballoc/datagen.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/model.hpp"

namespace bballoc::testing {

struct Entry {
  int slot;
  int user;
  double p;
};

// An instance whose matrix is given directly rather than derived from
// trajectories. Slots are s1.., users u1.., products p1...
struct Hand {
  Instance inst;
  InfluenceMatrix mat;
};

inline Hand make_hand(int num_slots, int num_users, const std::vector<int64_t>& budgets,
                      const std::vector<Entry>& entries,
                      const std::vector<std::vector<int>>& interests, double theta = 0.05) {
  Hand h;
  h.inst.theta = theta;
  h.inst.horizon_end = 3600;
  for (int s = 0; s < num_slots; ++s) {
    BillboardSlot slot;
    slot.billboard_id = "b" + std::to_string(s + 1);
    slot.slot_id = "s" + std::to_string(s + 1);
    slot.t_end = 3600;
    h.inst.slots.push_back(slot);
  }
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    h.inst.products.push_back(Product{"p" + std::to_string(i + 1), budgets[i]});
  }
  std::vector<std::vector<ProductIndex>> interest_index(num_users);
  for (int u = 0; u < num_users; ++u) {
    User user;
    user.id = "u" + std::to_string(u + 1);
    for (int i : interests[u]) {
      user.interests.push_back("p" + std::to_string(i + 1));
      interest_index[u].push_back(ProductIndex(i));
    }
    user.visits.push_back(Visit{{}, 0, 3600});
    h.inst.users.push_back(user);
  }
  std::vector<InfluenceTriplet> triplets;
  for (const Entry& e : entries) triplets.push_back({SlotIndex(e.slot), UserIndex(e.user), e.p});
  h.mat = InfluenceMatrix::from_triplets(num_slots, num_users, budgets.size(), triplets,
                                         interest_index);
  return h;
}

struct Generated {
  Instance inst;
  InfluenceMatrix mat;
};

inline Generated generated(const GenParams& params) {
  GeneratedInstance g = generate_instance(params);
  Generated out{std::move(g.instance), {}};
  out.mat = build_influence_matrix(out.inst);
  return out;
}

// A dense little city: |BS| = billboards * hours, every user likely to meet
// a few slots.
inline GenParams small_params(uint64_t seed, int64_t billboards, int64_t hours, int64_t products,
                              int64_t users = 30) {
  GenParams p;
  p.seed = seed;
  p.num_billboards = billboards;
  p.horizon = hours * 3600;
  p.delta = 3600;
  p.num_products = products;
  p.num_users = users;
  p.city_extent = 300.0;
  p.beta = 1.0 / static_cast<double>(products);
  return p;
}

}  // namespace bballoc::testing

#endif  // BBALLOC_TESTS_COMMON_HPP_
