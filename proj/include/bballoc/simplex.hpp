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

// Generic LP engine used by the relaxation module.
//
// The engine solves
//
//   minimize    c'x
//   subject to  a_r x <= b_r   or   a_r x = b_r      for every row r
//               l <= x <= u
//
// with finite lower bounds on every column. One logical variable is added per
// row (s_r >= 0 for inequalities, s_r = 0 for equalities) so that the initial
// basis is the identity. There is no phase one. The dual method needs that
// basis to be dual feasible once negative-cost columns sit at their (finite)
// upper bounds; the primal method needs it primal feasible with every column
// at its lower bound. The dual method falls back to the primal one when its
// start is unavailable, and a primal start that is infeasible is reported as
// such. Every model built in this library has both starts.

#ifndef BBALLOC_SIMPLEX_HPP_
#define BBALLOC_SIMPLEX_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace bballoc {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class RowSense : uint8_t { kLessEqual, kEqual };

struct SparseLp {
  std::size_t num_rows = 0;
  std::vector<double> rhs;
  std::vector<RowSense> sense;

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::size_t> col_start{0};
  std::vector<int32_t> row_index;
  std::vector<double> value;

  std::size_t num_cols() const { return cost.size(); }

  int32_t add_row(double rhs_value, RowSense row_sense);
  int32_t add_column(double cost_value, double lower_bound, double upper_bound,
                     std::span<const int32_t> rows, std::span<const double> values);
};

enum class SimplexAlgorithm { kDual, kPrimal };

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

std::string_view to_string(LpStatus status);

struct SimplexOptions {
  SimplexAlgorithm algorithm = SimplexAlgorithm::kDual;
  // Relative size of the cost shifts applied during the dual phase; they are
  // removed before the final primal pass.
  bool perturb_costs = true;
  double perturbation = 1e-3;
  double feasibility_tolerance = 1e-6;
  double optimality_tolerance = 1e-6;
  double pivot_tolerance = 1e-7;
  // 0 picks a limit proportional to the model size.
  int64_t max_iterations = 0;
  // Eta updates applied before the basis is refactorized from scratch.
  int refactor_interval = 100;
  // Consecutive degenerate pivots after which pricing falls back to Bland's
  // rule until progress resumes.
  int degenerate_limit = 50;
};

// Load a model, solve it, read the primal point back.
class LpSolver {
 public:
  virtual ~LpSolver() = default;

  virtual void load(const SparseLp& lp) = 0;
  virtual LpStatus solve() = 0;
  virtual std::span<const double> primal() const = 0;
  virtual double objective() const = 0;
  virtual int64_t iterations() const = 0;
};

// Bounded-variable revised simplex.
//
// The dual method uses steepest-edge row selection, a bound-flipping ratio
// test with a Harris pass and small deterministic cost shifts; a primal pass
// then removes whatever dual infeasibility those leave. The primal method uses
// devex pricing with lowest-index tie breaking, a two-pass Harris ratio test
// and a Bland fallback under stalling. The basis is factorized with a sparse
// LU and updated in product form between refactorizations. The run is fully
// deterministic for a given model and options.
class RevisedSimplex final : public LpSolver {
 public:
  explicit RevisedSimplex(SimplexOptions options = {});
  ~RevisedSimplex() override;
  RevisedSimplex(RevisedSimplex&&) noexcept;
  RevisedSimplex& operator=(RevisedSimplex&&) noexcept;

  void load(const SparseLp& lp) override;
  LpStatus solve() override;
  std::span<const double> primal() const override;
  double objective() const override;
  int64_t iterations() const override;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bballoc

#endif  // BBALLOC_SIMPLEX_HPP_
