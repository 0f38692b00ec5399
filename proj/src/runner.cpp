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

#include "bballoc/runner.hpp"

#include <chrono>

#include "bballoc/oracle.hpp"
#include "bballoc/rounding.hpp"

namespace bballoc {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kLpRr: return "lp-rr";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kRandom: return "random";
    case Algorithm::kTopk: return "topk";
    case Algorithm::kExact: return "exact";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  for (Algorithm a : all_algorithms()) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> kAll = {Algorithm::kLpRr, Algorithm::kGreedy,
                                              Algorithm::kRandom, Algorithm::kTopk,
                                              Algorithm::kExact};
  return kAll;
}

SolveOutcome run_solver(const Instance& inst, const InfluenceMatrix& mat, Algorithm algo,
                        const SolveOptions& options) {
  using Clock = std::chrono::steady_clock;
  SolveOutcome out;
  const BalanceOptions balance{options.theta, options.max_balance_iters};
  const auto start = Clock::now();
  switch (algo) {
    case Algorithm::kLpRr: {
      const RoundingConfig cfg{options.seed, options.max_balance_iters, options.theta};
      LpRrRun run = lp_rr_run(inst, mat, cfg, options.lp);
      out.allocation = std::move(run.allocation);
      out.balance_iterations = run.repair_iterations;
      out.lp_objective = run.lp.objective_value;
      out.lp_iterations = run.lp.iterations;
      break;
    }
    case Algorithm::kGreedy: {
      const GreedyConfig cfg{options.epsilon, options.seed, options.max_balance_iters,
                             options.theta, options.product_order};
      out.allocation = greedy_solve(inst, mat, cfg, &out.balance_iterations);
      break;
    }
    case Algorithm::kRandom:
      out.allocation = random_solve(inst, mat, options.seed, balance);
      break;
    case Algorithm::kTopk:
      out.allocation = topk_solve(inst, mat, balance, options.topk_fill);
      break;
    case Algorithm::kExact: {
      OracleOptions oracle;
      oracle.theta = options.theta;
      OracleResult result = enumerate_optimal(inst, mat, oracle);
      out.allocation = std::move(result.allocation);
      out.optimum = result.optimum;
      break;
    }
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

}  // namespace bballoc
