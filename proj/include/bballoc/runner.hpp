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

// One entry point for every solver, with wall-clock timing.

#ifndef BBALLOC_RUNNER_HPP_
#define BBALLOC_RUNNER_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bballoc/baselines.hpp"
#include "bballoc/greedy.hpp"
#include "bballoc/lp_relax.hpp"
#include "bballoc/model.hpp"

namespace bballoc {

enum class Algorithm { kLpRr, kGreedy, kRandom, kTopk, kExact };

std::string_view to_string(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view text);
const std::vector<Algorithm>& all_algorithms();

struct SolveOptions {
  uint64_t seed = 0;
  double epsilon = 0.1;
  int64_t max_balance_iters = 0;
  std::optional<double> theta;
  ProductOrder product_order = ProductOrder::kDeclared;
  TopkFill topk_fill = TopkFill::kSequential;
  LpRelaxOptions lp;
};

struct SolveOutcome {
  Allocation allocation;
  double wall_ms = 0.0;
  int64_t balance_iterations = 0;
  std::optional<double> lp_objective;  // lp-rr only
  int64_t lp_iterations = 0;
  std::optional<double> optimum;  // exact only
};

// Times the solver call alone; the matrix is built by the caller.
SolveOutcome run_solver(const Instance& inst, const InfluenceMatrix& mat, Algorithm algo,
                        const SolveOptions& options);

}  // namespace bballoc

#endif  // BBALLOC_RUNNER_HPP_
