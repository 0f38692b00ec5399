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

#include "bballoc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bballoc/errors.hpp"
#include "bballoc/influence.hpp"

namespace bballoc {
namespace {

constexpr uint64_t kBillboardStream = 11;
constexpr uint64_t kUserStream = 12;
constexpr uint64_t kDemandStream = 13;

constexpr double kMinSlotSize = 1.0;
constexpr double kMaxSlotSize = 20.0;
constexpr int64_t kMaxVisits = 10;
constexpr int64_t kMaxDwellSlots = 3;

int64_t floor_guarded(double value) { return static_cast<int64_t>(std::floor(value + 1e-9)); }

}  // namespace

std::string_view to_string(ThetaMode mode) {
  return mode == ThetaMode::kRelative ? "relative" : "absolute";
}

std::optional<ThetaMode> parse_theta_mode(std::string_view text) {
  if (text == "absolute") return ThetaMode::kAbsolute;
  if (text == "relative") return ThetaMode::kRelative;
  return std::nullopt;
}

int64_t GenParams::total_slots() const {
  return delta > 0 ? num_billboards * (horizon / delta) : 0;
}

GenParams GenParams::table_preset() { return GenParams{}; }

GenParams GenParams::text_preset() {
  GenParams p;
  p.alpha = 0.8;
  return p;
}

std::vector<std::string> validate_params(const GenParams& p) {
  std::vector<std::string> problems;
  if (p.num_billboards < 1) problems.push_back("num_billboards must be at least 1");
  if (p.delta < 1) problems.push_back("delta must be positive");
  if (p.horizon < 1) problems.push_back("horizon must be positive");
  if (p.delta >= 1 && p.horizon % p.delta != 0) problems.push_back("horizon must be a multiple of delta");
  if (p.num_users < 0) problems.push_back("num_users must be nonnegative");
  if (p.num_products < 1) problems.push_back("num_products must be at least 1");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) problems.push_back("alpha must lie in (0, 1]");
  if (!(p.beta > 0.0 && p.beta <= 1.0)) problems.push_back("beta must lie in (0, 1]");
  if (!(p.omega_lo > 0.0 && p.omega_lo <= p.omega_hi)) problems.push_back("omega range must satisfy 0 < lo <= hi");
  if (!(p.theta >= 0.0)) problems.push_back("theta must be nonnegative");
  if (!(p.lambda >= 0.0)) problems.push_back("lambda must be nonnegative");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) problems.push_back("epsilon must lie in (0, 1)");
  if (!(p.city_extent > 0.0)) problems.push_back("city_extent must be positive");
  if (problems.empty() && p.total_slots() < p.num_products) {
    problems.push_back("fewer slots than products");
  }
  return problems;
}

int64_t raw_demand(int64_t total_slots, double beta, double omega) {
  return floor_guarded(omega * static_cast<double>(total_slots) * beta);
}

DemandResult compute_demands(const GenParams& params, int64_t total_slots, Rng& rng) {
  std::vector<double> omega(static_cast<std::size_t>(params.num_products));
  for (double& w : omega) w = rng.uniform(params.omega_lo, params.omega_hi);
  return compute_demands(params, total_slots, omega);
}

DemandResult compute_demands(const GenParams& params, int64_t total_slots,
                             const std::vector<double>& omega) {
  const std::size_t n = omega.size();
  if (n == 0) throw DataError("no products to size");
  if (total_slots < static_cast<int64_t>(n)) throw DataError("fewer slots than products");
  DemandResult out;
  out.omega = omega;
  out.raw.resize(n);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.raw[i] = raw_demand(total_slots, params.beta, omega[i]);
    int64_t lifted = out.raw[i];
    if (lifted < 1) {
      lifted = 1;
      ++out.clamped;
    }
    weight[i] = static_cast<double>(lifted);
  }

  const int64_t target = std::max<int64_t>(static_cast<int64_t>(n),
                                           floor_guarded(params.alpha * static_cast<double>(total_slots)));
  const double weight_sum = std::accumulate(weight.begin(), weight.end(), 0.0);
  out.budgets.resize(n);
  std::vector<double> remainder(n);
  int64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = static_cast<double>(target) * weight[i] / weight_sum;
    out.budgets[i] = static_cast<int64_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(out.budgets[i]);
    assigned += out.budgets[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < target; k = (k + 1) % n, ++assigned) ++out.budgets[order[k]];

  // Lift zeros to 1, paying from the largest budgets.
  for (std::size_t i = 0; i < n; ++i) {
    if (out.budgets[i] >= 1) continue;
    const auto donor = std::max_element(out.budgets.begin(), out.budgets.end());
    --*donor;
    out.budgets[i] = 1;
  }
  return out;
}

GeneratedInstance generate_instance(const GenParams& params) {
  const std::vector<std::string> problems = validate_params(params);
  if (!problems.empty()) throw DataError("invalid generator parameters: " + problems.front());

  GeneratedInstance out;
  Instance& inst = out.instance;
  inst.coordinates = CoordinateMode::kPlanar;
  inst.delta = params.delta;
  inst.horizon_start = 0;
  inst.horizon_end = params.horizon;
  inst.lambda = params.lambda;
  inst.theta = params.theta;
  const double extent = params.city_extent;
  const int64_t slots_per_board = params.horizon / params.delta;

  Rng boards = Rng::derived(params.seed, kBillboardStream);
  for (int64_t b = 1; b <= params.num_billboards; ++b) {
    const Point loc{boards.uniform(0.0, extent), boards.uniform(0.0, extent)};
    const double size = boards.uniform(kMinSlotSize, kMaxSlotSize);
    for (int64_t t = 0; t < slots_per_board; ++t) {
      BillboardSlot slot;
      slot.billboard_id = "b" + std::to_string(b);
      slot.slot_id = slot.billboard_id + "_s" + std::to_string(t + 1);
      slot.loc = loc;
      slot.t_start = t * params.delta;
      slot.t_end = (t + 1) * params.delta;
      slot.size = size;
      inst.slots.push_back(std::move(slot));
    }
  }

  for (int64_t i = 1; i <= params.num_products; ++i) {
    inst.products.push_back(Product{"p" + std::to_string(i), 1});
  }

  Rng walk = Rng::derived(params.seed, kUserStream);
  const double step = extent / 20.0;
  const double include = std::min(1.0, 2.0 / static_cast<double>(params.num_products));
  for (int64_t u = 1; u <= params.num_users; ++u) {
    User user;
    user.id = "u" + std::to_string(u);
    for (const Product& p : inst.products) {
      if (walk.uniform01() < include) user.interests.push_back(p.id);
    }
    if (user.interests.empty()) {
      user.interests.push_back(inst.products[walk.below(inst.products.size())].id);
    }
    std::sort(user.interests.begin(), user.interests.end());

    const int64_t visits = walk.uniform_int(1, kMaxVisits);
    Point at{walk.uniform(0.0, extent), walk.uniform(0.0, extent)};
    for (int64_t v = 0; v < visits; ++v) {
      if (v > 0) {
        at.x = std::clamp(at.x + walk.uniform(-step, step), 0.0, extent);
        at.y = std::clamp(at.y + walk.uniform(-step, step), 0.0, extent);
      }
      const int64_t dwell = std::min(params.horizon, walk.uniform_int(1, kMaxDwellSlots) * params.delta);
      const int64_t start = walk.uniform_int(0, params.horizon - dwell);
      user.visits.push_back(Visit{at, start, start + dwell});
    }
    inst.users.push_back(std::move(user));
  }

  Rng demand = Rng::derived(params.seed, kDemandStream);
  out.demands = compute_demands(params, params.total_slots(), demand);
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    inst.products[i].budget = out.demands.budgets[i.pos()];
  }
  out.epsilon = params.epsilon;
  const int64_t total_budget =
      std::accumulate(out.demands.budgets.begin(), out.demands.budgets.end(), int64_t{0});
  out.achieved_alpha = static_cast<double>(total_budget) / static_cast<double>(params.total_slots());

  if (params.theta_mode == ThetaMode::kRelative) {
    const InfluenceMatrix mat = build_influence_matrix(inst);
    double sum = 0.0;
    for (SlotIndex s : index_range<SlotIndex>(inst.num_slots())) sum += mat.slot_weight(s);
    inst.theta = params.theta * sum / static_cast<double>(inst.num_slots());
  }
  return out;
}

}  // namespace bballoc
