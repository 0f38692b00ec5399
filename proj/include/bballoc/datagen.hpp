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

// Synthetic instances. Billboards are scattered uniformly over a square
// city, users wander it in short random walks, and product demands follow
// the supply/demand ratios alpha and beta.

#ifndef BBALLOC_DATAGEN_HPP_
#define BBALLOC_DATAGEN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bballoc/model.hpp"
#include "bballoc/random.hpp"

namespace bballoc {

enum class ThetaMode {
  kAbsolute,  // theta in expected-influence units
  kRelative,  // theta as a fraction of the mean single-slot influence
};

std::string_view to_string(ThetaMode mode);
std::optional<ThetaMode> parse_theta_mode(std::string_view text);

struct GenParams {
  int64_t num_billboards = 84;
  int64_t horizon = 24 * 3600;  // seconds, divisible by delta
  int64_t delta = 3600;
  int64_t num_users = 1000;
  int64_t num_products = 5;
  double alpha = 1.0;  // total demand / total supply
  double beta = 0.05;  // mean demand of one product / total supply
  double omega_lo = 0.8;
  double omega_hi = 1.2;
  double theta = 0.05;
  ThetaMode theta_mode = ThetaMode::kAbsolute;
  double lambda = 100.0;
  double epsilon = 0.1;
  double city_extent = 2000.0;  // side of the square city, meters
  uint64_t seed = 0;

  int64_t total_slots() const;

  // Defaults of the results table (alpha = 100%).
  static GenParams table_preset();
  // The alpha = 80% setting used in the experiment narrative.
  static GenParams text_preset();
};

// Empty when valid, else one message per problem.
std::vector<std::string> validate_params(const GenParams& params);

// floor(omega * total_slots * beta), guarded against representation error
// just below an integer.
int64_t raw_demand(int64_t total_slots, double beta, double omega);

struct DemandResult {
  std::vector<double> omega;
  std::vector<int64_t> raw;      // before the clamp
  std::vector<int64_t> budgets;  // final
  int64_t clamped = 0;           // raw demands lifted to 1
};

// Raw demands floor(omega_i sigma* beta), clamped to at least 1, then
// rescaled by largest remainder so the budgets sum to floor(alpha sigma*),
// each at least 1. Draws one omega per product from `rng`.
DemandResult compute_demands(const GenParams& params, int64_t total_slots, Rng& rng);
// Same rescaling with the omegas given.
DemandResult compute_demands(const GenParams& params, int64_t total_slots,
                             const std::vector<double>& omega);

struct GeneratedInstance {
  Instance instance;
  DemandResult demands;
  double epsilon = 0.1;
  double achieved_alpha = 0.0;
};

// Deterministic in params.seed. Theta and lambda never influence the random
// draws, so they can be varied on a fixed instance.
GeneratedInstance generate_instance(const GenParams& params);

}  // namespace bballoc

#endif  // BBALLOC_DATAGEN_HPP_
