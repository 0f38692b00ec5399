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

#include "bballoc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "bballoc/errors.hpp"
#include "bballoc/influence.hpp"

namespace bballoc {

std::string_view to_string(CoordinateMode mode) {
  return mode == CoordinateMode::kPlanar ? "planar" : "geodetic";
}

std::optional<CoordinateMode> parse_coordinate_mode(std::string_view text) {
  if (text == "planar") return CoordinateMode::kPlanar;
  if (text == "geodetic") return CoordinateMode::kGeodetic;
  return std::nullopt;
}

std::optional<SlotIndex> Instance::find_slot(std::string_view slot_id) const {
  for (SlotIndex s : index_range<SlotIndex>(slots.size())) {
    if (slots[s].slot_id == slot_id) return s;
  }
  return std::nullopt;
}

std::optional<ProductIndex> Instance::find_product(std::string_view product_id) const {
  for (ProductIndex i : index_range<ProductIndex>(products.size())) {
    if (products[i].id == product_id) return i;
  }
  return std::nullopt;
}

StrongVector<UserIndex, User> group_records(const std::vector<TrajectoryRecord>& records) {
  StrongVector<UserIndex, User> users;
  std::unordered_map<std::string, std::size_t> position;
  std::vector<std::set<std::string>> interests;
  for (const TrajectoryRecord& rec : records) {
    auto [it, inserted] = position.try_emplace(rec.user_id, users.size());
    if (inserted) {
      users.push_back(User{rec.user_id, {}, {}});
      interests.emplace_back();
    }
    User& user = users[it->second];
    user.visits.push_back(Visit{rec.loc, rec.t_start, rec.t_end});
    interests[it->second].insert(rec.interests.begin(), rec.interests.end());
  }
  for (std::size_t k = 0; k < users.size(); ++k) {
    users[k].interests.assign(interests[k].begin(), interests[k].end());
  }
  return users;
}

std::vector<TrajectoryRecord> flatten_users(const StrongVector<UserIndex, User>& users) {
  std::vector<TrajectoryRecord> records;
  for (const User& user : users) {
    for (const Visit& v : user.visits) {
      records.push_back(TrajectoryRecord{user.id, v.loc, v.t_start, v.t_end, user.interests});
    }
  }
  return records;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };

  if (inst.products.empty()) out.push_back("no products declared");
  if (inst.delta <= 0) out.push_back("nonpositive slot duration delta");
  if (!(inst.theta >= 0.0)) out.push_back("negative or NaN theta");
  if (!(inst.lambda >= 0.0)) out.push_back("negative or NaN lambda");
  if (inst.min_overlap < 0) out.push_back("negative min_overlap");
  if (inst.horizon_end < inst.horizon_start) {
    out.push_back("horizon end precedes horizon start");
  } else if (inst.delta > 0 && (inst.horizon_end - inst.horizon_start) % inst.delta != 0) {
    out.push_back("horizon length not divisible by delta");
  }

  std::unordered_set<std::string> product_ids;
  for (const Product& p : inst.products) {
    if (!product_ids.insert(p.id).second) out.push_back("duplicate product id " + quoted(p.id));
    if (p.budget < 1) out.push_back("nonpositive budget " + p.id);
  }

  std::unordered_set<std::string> slot_ids;
  for (const BillboardSlot& s : inst.slots) {
    if (!slot_ids.insert(s.slot_id).second) out.push_back("duplicate slot id " + quoted(s.slot_id));
    if (s.t_end - s.t_start != inst.delta) {
      out.push_back("slot " + quoted(s.slot_id) + " duration " + std::to_string(s.t_end - s.t_start) +
                    " differs from delta " + std::to_string(inst.delta));
    }
    if (!(s.size > 0.0) || !std::isfinite(s.size)) {
      out.push_back("nonpositive size for slot " + quoted(s.slot_id));
    }
  }

  std::unordered_set<std::string> user_ids;
  for (const User& u : inst.users) {
    if (!user_ids.insert(u.id).second) out.push_back("duplicate user id " + quoted(u.id));
    for (const Visit& v : u.visits) {
      if (v.t_start >= v.t_end) {
        out.push_back("empty time interval for user " + quoted(u.id));
        break;
      }
    }
    for (const std::string& p : u.interests) {
      if (!product_ids.contains(p)) {
        out.push_back("user " + quoted(u.id) + " references undeclared product " + quoted(p));
      }
    }
  }
  return out;
}

double Allocation::total_influence() const {
  return std::accumulate(per_product_influence.begin(), per_product_influence.end(), 0.0);
}

Allocation finalize_allocation(const Instance& inst, const InfluenceMatrix& mat,
                               Assignments assignments, uint64_t seed) {
  Allocation alloc;
  assignments.resize(inst.num_products());
  for (auto& slots : assignments) std::sort(slots.begin(), slots.end());
  alloc.assignments = std::move(assignments);
  alloc.per_product_influence.resize(inst.num_products());
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    alloc.per_product_influence[i] = product_influence(mat, i, alloc.assignments[i]);
  }
  alloc.fairness_gap = inst.num_products() == 0 ? 0.0 : fairness_gap(alloc.per_product_influence);
  alloc.balance_satisfied = alloc.fairness_gap <= inst.theta + kInfluenceTolerance;
  alloc.seed = seed;
  return alloc;
}

Assignments resolve_assignments(const Instance& inst, const std::vector<IdAssignment>& ids) {
  std::unordered_map<std::string_view, SlotIndex> slot_of;
  for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) slot_of.emplace(inst.slots[s].slot_id, s);
  Assignments out(inst.num_products());
  for (const IdAssignment& entry : ids) {
    std::optional<ProductIndex> product = inst.find_product(entry.product_id);
    if (!product) throw UnknownIdError("product", entry.product_id);
    for (const std::string& slot_id : entry.slot_ids) {
      auto it = slot_of.find(slot_id);
      if (it == slot_of.end()) throw UnknownIdError("slot", slot_id);
      out[*product].push_back(it->second);
    }
  }
  for (auto& set : out) std::sort(set.begin(), set.end());
  return out;
}

std::vector<IdAssignment> to_id_assignments(const Instance& inst, const Assignments& assignments) {
  std::vector<IdAssignment> out;
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    IdAssignment entry{inst.products[i].id, {}};
    if (i.pos() < assignments.size()) {
      for (SlotIndex s : assignments[i]) entry.slot_ids.push_back(inst.slots[s].slot_id);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

FeasibilityReport check_allocation(const Instance& inst, const InfluenceMatrix& mat,
                                   const Assignments& assignments) {
  if (assignments.size() > inst.num_products()) {
    throw UnknownIdError("product", "#" + std::to_string(inst.num_products()));
  }
  FeasibilityReport report;
  std::vector<int> holders(inst.num_slots(), 0);
  report.per_product_influence.assign(inst.num_products(), 0.0);

  for (ProductIndex i : index_range<ProductIndex>(assignments.size())) {
    std::vector<SlotIndex> slots = assignments[i];
    for (SlotIndex s : slots) {
      if (s.value() < 0 || s.pos() >= inst.num_slots()) {
        throw UnknownIdError("slot", "#" + std::to_string(s.value()));
      }
      ++holders[s.pos()];
    }
    const Product& product = inst.products[i];
    if (static_cast<int64_t>(slots.size()) > product.budget) {
      report.budget_ok = false;
      report.violations.push_back("product " + product.id + " exceeds budget: " +
                                  std::to_string(slots.size()) + " slots > " +
                                  std::to_string(product.budget));
    }
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    report.per_product_influence[i] = product_influence(mat, i, slots);
  }
  for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) {
    if (holders[s.pos()] > 1) {
      report.disjoint_ok = false;
      report.violations.push_back("slot " + inst.slots[s].slot_id + " assigned " +
                                  std::to_string(holders[s.pos()]) + " times");
    }
  }
  report.fairness_gap = inst.num_products() == 0 ? 0.0 : fairness_gap(report.per_product_influence);
  report.balance_ok = report.fairness_gap <= inst.theta + kInfluenceTolerance;
  return report;
}

FeasibilityReport check_allocation(const Instance& inst, const InfluenceMatrix& mat,
                                   const Allocation& alloc) {
  return check_allocation(inst, mat, alloc.assignments);
}

}  // namespace bballoc
