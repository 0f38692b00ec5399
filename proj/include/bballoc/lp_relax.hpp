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

// Linear relaxation of the slot allocation problem.
//
//   maximize    sum_i sum_{u in U_i} y[u,i]
//   subject to  sum_s x[s,i]                     <= k_i     (budget, per product)
//               sum_i x[s,i]                     <= 1       (disjointness, per slot)
//               y[u,i] - sum_s p(s,u) x[s,i]     <= 0       (linking, per u in U_i)
//               sum_u y[u,i] - sum_u y[u,j]      <= theta   (balance, per ordered pair)
//               0 <= x, y <= 1
//
// The linking row bounds the probabilistic coverage of u by a linear
// function, so the objective is a surrogate for the expected influence.

#ifndef BBALLOC_LP_RELAX_HPP_
#define BBALLOC_LP_RELAX_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bballoc/influence.hpp"
#include "bballoc/ipm.hpp"
#include "bballoc/model.hpp"
#include "bballoc/simplex.hpp"

namespace bballoc {

enum class LpVarKind : uint8_t { kSlotProduct, kUserProduct };

struct LpVariable {
  LpVarKind kind;
  int32_t entity;  // slot index for x, user index for y
  ProductIndex product;
  double objective;
};

enum class LpRowFamily : uint8_t { kBudget, kDisjointness, kLinking, kBalance };

struct LpTerm {
  int32_t var;
  double coef;
};

// Every row reads  sum(terms) <= rhs.
struct LpRow {
  LpRowFamily family;
  // Budget: (product, -1). Disjointness: (slot, -1). Linking: (user,
  // product). Balance: (i, j) for sum y_i - sum y_j.
  int32_t first;
  int32_t second;
  std::vector<LpTerm> terms;
  double rhs;
};

struct LpModel {
  // x variables first in (slot, product) order, then y in (user, product)
  // order; the simplex breaks ties by this index.
  std::vector<LpVariable> variables;
  std::vector<LpRow> rows;
  std::size_t num_x = 0;
  std::size_t num_y = 0;
  double theta = 0.0;

  std::size_t count_rows(LpRowFamily family) const;
};

// x[s,i] is created only when s reaches some user of U_i. Balance rows are
// left out when theta is infinite.
LpModel build_lp(const Instance& inst, const InfluenceMatrix& mat);
LpModel build_lp(const Instance& inst, const InfluenceMatrix& mat, double theta);

struct XValue {
  SlotIndex slot;
  ProductIndex product;
  double value;
};

struct YValue {
  UserIndex user;
  ProductIndex product;
  double value;
};

struct FractionalSolution {
  std::vector<XValue> x_star;  // nonzero entries, (slot, product) order
  std::vector<YValue> y_star;  // nonzero entries, (user, product) order
  double objective_value = 0.0;
  LpStatus status = LpStatus::kOptimal;
  int64_t iterations = 0;
};

enum class LpMethod : uint8_t {
  // Dual simplex up to ipm_row_threshold rows after presolve, interior point
  // above.
  kAuto,
  kSimplex,
  kInteriorPoint,
};

struct LpRelaxOptions {
  LpMethod method = LpMethod::kAuto;
  std::size_t ipm_row_threshold = 5000;
  SimplexOptions simplex;
  InteriorPointOptions interior_point;
  // Solve the balance rows through one aggregate variable per product
  // (t_i = sum_u y[u,i]; t_i - t_j <= theta). Same feasible set in (x, y),
  // far sparser basis when there are many products.
  bool aggregate_balance = true;
};

// Solves with the built-in engine chosen by options.method.
FractionalSolution solve_lp(const LpModel& model, const LpRelaxOptions& options = {});
// Solves with any engine behind the LpSolver interface.
FractionalSolution solve_lp(const LpModel& model, LpSolver& solver,
                            bool aggregate_balance = true);

// The relaxation optimum: an upper bound on the surrogate objective of every
// integral allocation. Throws SolverError unless the solve was optimal.
double lp_upper_bound(const FractionalSolution& sol);

// Largest violation of any row or bound by a fractional point given as one
// value per model variable.
double max_violation(const LpModel& model, const std::vector<double>& values);

// Values of the model variables in model order, zeros where absent.
std::vector<double> model_values(const LpModel& model, const FractionalSolution& sol);

// CPLEX LP text format. Variables are named x_<slot id>_<product id> and
// y_<user id>_<product id>.
void write_lp(std::ostream& out, const LpModel& model, const Instance& inst);

}  // namespace bballoc

#endif  // BBALLOC_LP_RELAX_HPP_
