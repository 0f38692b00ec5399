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

#ifndef BBALLOC_INFLUENCE_HPP_
#define BBALLOC_INFLUENCE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "bballoc/model.hpp"
#include "bballoc/strong_index.hpp"

namespace bballoc {

struct SlotUserEntry {
  UserIndex user;
  double p;
};

struct UserSlotEntry {
  SlotIndex slot;
  double p;
};

struct InfluenceTriplet {
  SlotIndex slot;
  UserIndex user;
  double p;
};

// Sparse slot x user matrix of influence probabilities, plus the user
// interest structure (which users count toward which product).
//
// Stored twice, slot-major and user-major, both sorted by the partner index.
// Absent entries mean probability zero. Immutable once built.
class InfluenceMatrix {
 public:
  InfluenceMatrix() = default;

  // `interests[u]` lists the products user u cares about. Duplicate (slot,
  // user) triplets keep the largest probability; zero entries are dropped.
  // Throws StructuralError on out-of-range indices or p outside [0, 1].
  static InfluenceMatrix from_triplets(std::size_t num_slots, std::size_t num_users,
                                       std::size_t num_products,
                                       std::vector<InfluenceTriplet> triplets,
                                       const std::vector<std::vector<ProductIndex>>& interests,
                                       double max_size = 1.0);

  std::size_t num_slots() const { return slot_start_.size() - 1; }
  std::size_t num_users() const { return user_start_.size() - 1; }
  std::size_t num_products() const { return product_user_start_.size() - 1; }
  std::size_t num_entries() const { return slot_entries_.size(); }
  double max_size() const { return max_size_; }

  std::span<const SlotUserEntry> slot_users(SlotIndex s) const {
    return {slot_entries_.data() + slot_start_[s.pos()],
            slot_entries_.data() + slot_start_[s.pos() + 1]};
  }
  std::span<const UserSlotEntry> user_slots(UserIndex u) const {
    return {user_entries_.data() + user_start_[u.pos()],
            user_entries_.data() + user_start_[u.pos() + 1]};
  }

  // Users interested in product i (the set U_i), ascending.
  std::span<const UserIndex> product_users(ProductIndex i) const {
    return {product_users_.data() + product_user_start_[i.pos()],
            product_users_.data() + product_user_start_[i.pos() + 1]};
  }
  bool interested(UserIndex u, ProductIndex i) const {
    return interest_mask_[i.pos() * num_users() + u.pos()] != 0;
  }

  double probability(SlotIndex s, UserIndex u) const;

  // Singleton influence of s over every user: sum of its probabilities.
  double slot_weight(SlotIndex s) const;

 private:
  std::vector<std::size_t> slot_start_{0};
  std::vector<SlotUserEntry> slot_entries_;
  std::vector<std::size_t> user_start_{0};
  std::vector<UserSlotEntry> user_entries_;
  std::vector<std::size_t> product_user_start_{0};
  std::vector<UserIndex> product_users_;
  std::vector<uint8_t> interest_mask_;
  double max_size_ = 1.0;
};

// p(s, u) = size(s) / max slot size when u has a visit within lambda of the
// slot overlapping its time window by at least inst.min_overlap seconds.
// Expects a valid instance; throws StructuralError when there are no slots.
InfluenceMatrix build_influence_matrix(const Instance& inst);

// Distance in meters under the instance's coordinate mode.
double distance_meters(Point a, Point b, CoordinateMode mode);

// Expected number of influenced users among `users`:
//   sum_u [1 - prod_{s in slots} (1 - p(s,u))].
double exact_influence(const InfluenceMatrix& mat, std::span<const SlotIndex> slots,
                       std::span<const UserIndex> users);

// Clipped-sum surrogate: sum_u min{1, sum_{s in slots} p(s,u)}. Never below
// exact_influence for the same arguments.
double approx_influence(const InfluenceMatrix& mat, std::span<const SlotIndex> slots,
                        std::span<const UserIndex> users);

// Exact influence of `slots` restricted to the users of product i.
double product_influence(const InfluenceMatrix& mat, ProductIndex i,
                         std::span<const SlotIndex> slots);

// max - min over products. Throws StructuralError for an empty input.
double fairness_gap(std::span<const double> per_product_influence);

// Incrementally maintained coverage of one slot set per product.
//
// For each (product, user in U_i) the survival probability
// prod (1 - p(s,u)) over the product's slots is kept in log space, with a
// separate count of certain (p = 1) exposures so that removals stay exact.
class CoverageState {
 public:
  explicit CoverageState(const InfluenceMatrix& mat);

  const InfluenceMatrix& matrix() const { return *mat_; }

  void add(ProductIndex i, SlotIndex s);
  void remove(ProductIndex i, SlotIndex s);

  // Influence added to product i by inserting s (s not yet held by i).
  double marginal_gain(ProductIndex i, SlotIndex s) const;
  // Influence lost by product i when s (held by i) is removed.
  double removal_loss(ProductIndex i, SlotIndex s) const;

  double influence(ProductIndex i) const { return influence_[i.pos()]; }
  double survival(ProductIndex i, UserIndex u) const;

  // Rebuilds every accumulator from the stored survival terms.
  void recompute_influence();

 private:
  std::size_t cell(ProductIndex i, UserIndex u) const {
    return i.pos() * mat_->num_users() + u.pos();
  }
  void apply(ProductIndex i, SlotIndex s, int sign);

  const InfluenceMatrix* mat_;
  std::vector<double> log_survival_;
  std::vector<int32_t> certain_;
  std::vector<double> influence_;
};

}  // namespace bballoc

#endif  // BBALLOC_INFLUENCE_HPP_
