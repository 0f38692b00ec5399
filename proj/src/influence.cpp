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

#include "bballoc/influence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <unordered_map>

#include "bballoc/errors.hpp"

namespace bballoc {
namespace {

constexpr double kEarthRadiusMeters = 6371008.8;

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

// Uniform grid over visit locations, projected to meters. Cells are looked up
// by binary search over a sorted key list so that construction and queries
// are deterministic.
class VisitGrid {
 public:
  struct Item {
    int64_t cx;
    int64_t cy;
    int32_t visit;
  };

  VisitGrid(double cell, double origin_lat_rad, CoordinateMode mode)
      : cell_(cell), cos_lat_(std::cos(origin_lat_rad)), mode_(mode) {}

  std::pair<double, double> project(Point p) const {
    if (mode_ == CoordinateMode::kPlanar) return {p.x, p.y};
    return {kEarthRadiusMeters * radians(p.x) * cos_lat_, kEarthRadiusMeters * radians(p.y)};
  }

  std::pair<int64_t, int64_t> cell_of(Point p) const {
    auto [x, y] = project(p);
    return {static_cast<int64_t>(std::floor(x / cell_)), static_cast<int64_t>(std::floor(y / cell_))};
  }

  void add(Point p, int32_t visit) {
    auto [cx, cy] = cell_of(p);
    items_.push_back(Item{cx, cy, visit});
  }

  void finish() {
    std::sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) {
      return std::tie(a.cx, a.cy, a.visit) < std::tie(b.cx, b.cy, b.visit);
    });
  }

  template <typename Fn>
  void for_each_in_cell(int64_t cx, int64_t cy, Fn&& fn) const {
    auto lo = std::lower_bound(items_.begin(), items_.end(), std::pair{cx, cy},
                               [](const Item& item, const std::pair<int64_t, int64_t>& key) {
                                 return std::tie(item.cx, item.cy) < std::tie(key.first, key.second);
                               });
    for (auto it = lo; it != items_.end() && it->cx == cx && it->cy == cy; ++it) fn(it->visit);
  }

  double cell() const { return cell_; }

 private:
  double cell_;
  double cos_lat_;
  CoordinateMode mode_;
  std::vector<Item> items_;
};

}  // namespace

InfluenceMatrix InfluenceMatrix::from_triplets(
    std::size_t num_slots, std::size_t num_users, std::size_t num_products,
    std::vector<InfluenceTriplet> triplets,
    const std::vector<std::vector<ProductIndex>>& interests, double max_size) {
  if (interests.size() != num_users) {
    throw StructuralError("interest lists do not match the user count");
  }
  for (const InfluenceTriplet& t : triplets) {
    if (t.slot.value() < 0 || t.slot.pos() >= num_slots || t.user.value() < 0 ||
        t.user.pos() >= num_users) {
      throw StructuralError("influence entry index out of range");
    }
    if (!(t.p >= 0.0 && t.p <= 1.0)) {
      throw StructuralError("influence probability outside [0, 1]");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(a.slot, a.user, b.p) < std::tie(b.slot, b.user, a.p);
  });

  InfluenceMatrix m;
  m.max_size_ = max_size;
  m.slot_start_.assign(num_slots + 1, 0);
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const InfluenceTriplet& t = triplets[k];
    // Sorted with the largest p first inside a (slot, user) run.
    if (k > 0 && triplets[k - 1].slot == t.slot && triplets[k - 1].user == t.user) continue;
    if (t.p == 0.0) continue;
    m.slot_entries_.push_back(SlotUserEntry{t.user, t.p});
    ++m.slot_start_[t.slot.pos() + 1];
  }
  for (std::size_t s = 0; s < num_slots; ++s) m.slot_start_[s + 1] += m.slot_start_[s];

  m.user_start_.assign(num_users + 1, 0);
  for (const SlotUserEntry& e : m.slot_entries_) ++m.user_start_[e.user.pos() + 1];
  for (std::size_t u = 0; u < num_users; ++u) m.user_start_[u + 1] += m.user_start_[u];
  m.user_entries_.resize(m.slot_entries_.size());
  std::vector<std::size_t> fill(m.user_start_.begin(), m.user_start_.end() - 1);
  for (std::size_t s = 0; s < num_slots; ++s) {
    for (std::size_t k = m.slot_start_[s]; k < m.slot_start_[s + 1]; ++k) {
      const SlotUserEntry& e = m.slot_entries_[k];
      m.user_entries_[fill[e.user.pos()]++] =
          UserSlotEntry{SlotIndex(static_cast<int32_t>(s)), e.p};
    }
  }

  m.interest_mask_.assign(num_products * num_users, 0);
  m.product_user_start_.assign(num_products + 1, 0);
  for (std::size_t u = 0; u < num_users; ++u) {
    for (ProductIndex i : interests[u]) {
      if (i.value() < 0 || i.pos() >= num_products) {
        throw StructuralError("interest references a product index out of range");
      }
      uint8_t& bit = m.interest_mask_[i.pos() * num_users + u];
      if (bit == 0) ++m.product_user_start_[i.pos() + 1];
      bit = 1;
    }
  }
  for (std::size_t i = 0; i < num_products; ++i) {
    m.product_user_start_[i + 1] += m.product_user_start_[i];
  }
  m.product_users_.resize(m.product_user_start_.back());
  for (std::size_t i = 0; i < num_products; ++i) {
    std::size_t at = m.product_user_start_[i];
    for (std::size_t u = 0; u < num_users; ++u) {
      if (m.interest_mask_[i * num_users + u]) {
        m.product_users_[at++] = UserIndex(static_cast<int32_t>(u));
      }
    }
  }
  return m;
}

double InfluenceMatrix::probability(SlotIndex s, UserIndex u) const {
  auto entries = slot_users(s);
  auto it = std::lower_bound(entries.begin(), entries.end(), u,
                             [](const SlotUserEntry& e, UserIndex key) { return e.user < key; });
  return (it != entries.end() && it->user == u) ? it->p : 0.0;
}

double InfluenceMatrix::slot_weight(SlotIndex s) const {
  double total = 0.0;
  for (const SlotUserEntry& e : slot_users(s)) total += e.p;
  return total;
}

double distance_meters(Point a, Point b, CoordinateMode mode) {
  if (mode == CoordinateMode::kPlanar) return std::hypot(a.x - b.x, a.y - b.y);
  const double lat1 = radians(a.y);
  const double lat2 = radians(b.y);
  const double dlat = lat2 - lat1;
  const double dlon = radians(b.x - a.x);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

InfluenceMatrix build_influence_matrix(const Instance& inst) {
  if (inst.slots.empty()) throw StructuralError("cannot build an influence matrix without slots");
  double max_size = 0.0;
  for (const BillboardSlot& s : inst.slots) max_size = std::max(max_size, s.size);
  if (!(max_size > 0.0)) throw StructuralError("maximum slot size is not positive");

  std::unordered_map<std::string_view, ProductIndex> product_of;
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    product_of.emplace(inst.products[i].id, i);
  }
  std::vector<std::vector<ProductIndex>> interests(inst.num_users());
  struct FlatVisit {
    UserIndex user;
    const Visit* visit;
  };
  std::vector<FlatVisit> visits;
  double lat_sum = 0.0;
  for (UserIndex u : index_range<UserIndex>(inst.num_users())) {
    for (const std::string& id : inst.users[u].interests) {
      auto it = product_of.find(id);
      if (it == product_of.end()) throw UnknownIdError("product", id);
      interests[u.pos()].push_back(it->second);
    }
    for (const Visit& v : inst.users[u].visits) {
      visits.push_back(FlatVisit{u, &v});
      lat_sum += v.loc.y;
    }
  }

  const bool geodetic = inst.coordinates == CoordinateMode::kGeodetic;
  const double origin_lat = visits.empty() ? 0.0 : radians(lat_sum / visits.size());
  // The equirectangular projection is only used to prune candidates; the
  // exact test below uses the real metric, so the geodetic reach is widened.
  const double reach = geodetic ? inst.lambda * 1.5 + 1.0 : inst.lambda;
  const double cell = std::max(inst.lambda, 1.0);
  const int64_t span = static_cast<int64_t>(std::ceil(reach / cell));

  VisitGrid grid(cell, origin_lat, inst.coordinates);
  for (std::size_t k = 0; k < visits.size(); ++k) {
    grid.add(visits[k].visit->loc, static_cast<int32_t>(k));
  }
  grid.finish();

  std::vector<InfluenceTriplet> triplets;
  std::vector<int32_t> last_slot(inst.num_users(), -1);
  for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) {
    const BillboardSlot& slot = inst.slots[s];
    const double p = slot.size / max_size;
    auto [cx, cy] = grid.cell_of(slot.loc);
    for (int64_t dx = -span; dx <= span; ++dx) {
      for (int64_t dy = -span; dy <= span; ++dy) {
        grid.for_each_in_cell(cx + dx, cy + dy, [&](int32_t k) {
          const FlatVisit& fv = visits[static_cast<std::size_t>(k)];
          if (last_slot[fv.user.pos()] == s.value()) return;
          const int64_t overlap = std::min(fv.visit->t_end, slot.t_end) -
                                  std::max(fv.visit->t_start, slot.t_start);
          if (overlap < inst.min_overlap || overlap <= 0) return;
          if (distance_meters(slot.loc, fv.visit->loc, inst.coordinates) > inst.lambda) return;
          last_slot[fv.user.pos()] = s.value();
          triplets.push_back(InfluenceTriplet{s, fv.user, p});
        });
      }
    }
  }
  return InfluenceMatrix::from_triplets(inst.num_slots(), inst.num_users(), inst.num_products(),
                                        std::move(triplets), interests, max_size);
}

double exact_influence(const InfluenceMatrix& mat, std::span<const SlotIndex> slots,
                       std::span<const UserIndex> users) {
  if (slots.empty() || users.empty()) return 0.0;
  std::vector<double> survival(mat.num_users(), 1.0);
  for (SlotIndex s : slots) {
    for (const SlotUserEntry& e : mat.slot_users(s)) survival[e.user.pos()] *= 1.0 - e.p;
  }
  double total = 0.0;
  for (UserIndex u : users) total += 1.0 - survival[u.pos()];
  return total;
}

double approx_influence(const InfluenceMatrix& mat, std::span<const SlotIndex> slots,
                        std::span<const UserIndex> users) {
  if (slots.empty() || users.empty()) return 0.0;
  std::vector<double> mass(mat.num_users(), 0.0);
  for (SlotIndex s : slots) {
    for (const SlotUserEntry& e : mat.slot_users(s)) mass[e.user.pos()] += e.p;
  }
  double total = 0.0;
  for (UserIndex u : users) total += std::min(1.0, mass[u.pos()]);
  return total;
}

double product_influence(const InfluenceMatrix& mat, ProductIndex i,
                         std::span<const SlotIndex> slots) {
  return exact_influence(mat, slots, mat.product_users(i));
}

double fairness_gap(std::span<const double> per_product_influence) {
  if (per_product_influence.empty()) {
    throw StructuralError("fairness gap of an empty product set");
  }
  auto [lo, hi] = std::minmax_element(per_product_influence.begin(), per_product_influence.end());
  return *hi - *lo;
}

CoverageState::CoverageState(const InfluenceMatrix& mat)
    : mat_(&mat),
      log_survival_(mat.num_products() * mat.num_users(), 0.0),
      certain_(mat.num_products() * mat.num_users(), 0),
      influence_(mat.num_products(), 0.0) {}

double CoverageState::survival(ProductIndex i, UserIndex u) const {
  const std::size_t c = cell(i, u);
  return certain_[c] > 0 ? 0.0 : std::exp(log_survival_[c]);
}

void CoverageState::apply(ProductIndex i, SlotIndex s, int sign) {
  double delta = 0.0;
  for (const SlotUserEntry& e : mat_->slot_users(s)) {
    if (!mat_->interested(e.user, i)) continue;
    const std::size_t c = cell(i, e.user);
    const double before = certain_[c] > 0 ? 0.0 : std::exp(log_survival_[c]);
    if (e.p >= 1.0) {
      certain_[c] += sign;
    } else {
      log_survival_[c] += sign * std::log1p(-e.p);
    }
    const double after = certain_[c] > 0 ? 0.0 : std::exp(log_survival_[c]);
    delta += before - after;
  }
  influence_[i.pos()] += delta;
}

void CoverageState::add(ProductIndex i, SlotIndex s) { apply(i, s, +1); }

void CoverageState::remove(ProductIndex i, SlotIndex s) { apply(i, s, -1); }

double CoverageState::marginal_gain(ProductIndex i, SlotIndex s) const {
  double gain = 0.0;
  for (const SlotUserEntry& e : mat_->slot_users(s)) {
    if (!mat_->interested(e.user, i)) continue;
    gain += e.p * survival(i, e.user);
  }
  return gain;
}

double CoverageState::removal_loss(ProductIndex i, SlotIndex s) const {
  double loss = 0.0;
  for (const SlotUserEntry& e : mat_->slot_users(s)) {
    if (!mat_->interested(e.user, i)) continue;
    const std::size_t c = cell(i, e.user);
    const double with = certain_[c] > 0 ? 0.0 : std::exp(log_survival_[c]);
    double without;
    if (e.p >= 1.0) {
      without = certain_[c] > 1 ? 0.0 : std::exp(log_survival_[c]);
    } else {
      without = certain_[c] > 0 ? 0.0 : std::exp(log_survival_[c] - std::log1p(-e.p));
    }
    loss += without - with;
  }
  return loss;
}

void CoverageState::recompute_influence() {
  for (ProductIndex i : index_range<ProductIndex>(mat_->num_products())) {
    double total = 0.0;
    for (UserIndex u : mat_->product_users(i)) total += 1.0 - survival(i, u);
    influence_[i.pos()] = total;
  }
}

}  // namespace bballoc
