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

// Domain types for the trajectory and billboard databases, the allocation
// problem built on top of them, and the checks that tie the two together.

#ifndef BBALLOC_MODEL_HPP_
#define BBALLOC_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bballoc/strong_index.hpp"

namespace bballoc {

class InfluenceMatrix;

// Absolute tolerance used for every influence comparison in the library.
inline constexpr double kInfluenceTolerance = 1e-9;

enum class CoordinateMode {
  kPlanar,    // x, y in meters on a projected plane
  kGeodetic,  // x = longitude, y = latitude, in degrees; haversine meters
};

std::string_view to_string(CoordinateMode mode);
std::optional<CoordinateMode> parse_coordinate_mode(std::string_view text);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// One presence interval of a user: at `loc` during [t_start, t_end].
struct Visit {
  Point loc;
  int64_t t_start = 0;
  int64_t t_end = 0;
};

// A row of the trajectory database. Rows sharing a user_id are grouped into a
// User when an instance is assembled.
struct TrajectoryRecord {
  std::string user_id;
  Point loc;
  int64_t t_start = 0;
  int64_t t_end = 0;
  std::vector<std::string> interests;
};

struct User {
  std::string id;
  std::vector<std::string> interests;  // product ids, sorted, unique
  std::vector<Visit> visits;
};

struct BillboardSlot {
  std::string billboard_id;
  std::string slot_id;
  Point loc;
  int64_t t_start = 0;
  int64_t t_end = 0;
  double size = 1.0;
};

struct Product {
  std::string id;
  int64_t budget = 1;  // maximum number of slots (unit slot cost)
};

struct Instance {
  CoordinateMode coordinates = CoordinateMode::kPlanar;
  StrongVector<SlotIndex, BillboardSlot> slots;
  StrongVector<UserIndex, User> users;
  StrongVector<ProductIndex, Product> products;
  double theta = 0.05;      // influence-difference threshold
  double lambda = 100.0;    // influence radius, meters
  int64_t delta = 3600;     // slot duration, seconds
  int64_t horizon_start = 0;
  int64_t horizon_end = 0;
  int64_t min_overlap = 1;  // seconds of shared time for a visit to count

  std::size_t num_slots() const { return slots.size(); }
  std::size_t num_users() const { return users.size(); }
  std::size_t num_products() const { return products.size(); }

  std::optional<SlotIndex> find_slot(std::string_view slot_id) const;
  std::optional<ProductIndex> find_product(std::string_view product_id) const;
};

// Groups flat trajectory rows by user id (first-appearance order). The
// interest set of a user is the union over that user's rows.
StrongVector<UserIndex, User> group_records(const std::vector<TrajectoryRecord>& records);

// Inverse of group_records: one row per visit.
std::vector<TrajectoryRecord> flatten_users(const StrongVector<UserIndex, User>& users);

// Returns one human-readable line per broken invariant; empty iff valid.
std::vector<std::string> validate_instance(const Instance& inst);

// Slot sets per product, each kept sorted ascending.
using Assignments = StrongVector<ProductIndex, std::vector<SlotIndex>>;

struct Allocation {
  Assignments assignments;
  StrongVector<ProductIndex, double> per_product_influence;
  double fairness_gap = 0.0;
  bool balance_satisfied = true;
  uint64_t seed = 0;

  double total_influence() const;
};

// Scores raw assignments with the exact product-specific influence.
Allocation finalize_allocation(const Instance& inst, const InfluenceMatrix& mat,
                               Assignments assignments, uint64_t seed);

// Allocation expressed with the external string identifiers.
struct IdAssignment {
  std::string product_id;
  std::vector<std::string> slot_ids;
};

// Maps ids to indices. Throws UnknownIdError naming the offending id.
// Products missing from `ids` receive an empty slot set.
Assignments resolve_assignments(const Instance& inst, const std::vector<IdAssignment>& ids);
std::vector<IdAssignment> to_id_assignments(const Instance& inst, const Assignments& assignments);

struct FeasibilityReport {
  bool budget_ok = true;
  bool disjoint_ok = true;
  bool balance_ok = true;
  double fairness_gap = 0.0;
  StrongVector<ProductIndex, double> per_product_influence;
  std::vector<std::string> violations;

  bool hard_constraints_ok() const { return budget_ok && disjoint_ok; }
};

// Recomputes influence from scratch; nothing in `assignments` is trusted.
// Throws UnknownIdError for indices outside the instance.
FeasibilityReport check_allocation(const Instance& inst, const InfluenceMatrix& mat,
                                   const Assignments& assignments);
FeasibilityReport check_allocation(const Instance& inst, const InfluenceMatrix& mat,
                                   const Allocation& alloc);

}  // namespace bballoc

#endif  // BBALLOC_MODEL_HPP_
