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

#include "bballoc/lp_relax.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bballoc/errors.hpp"
#include "bballoc/text.hpp"

namespace bballoc {

std::size_t LpModel::count_rows(LpRowFamily family) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const LpRow& r) { return r.family == family; }));
}

LpModel build_lp(const Instance& inst, const InfluenceMatrix& mat) {
  return build_lp(inst, mat, inst.theta);
}

LpModel build_lp(const Instance& inst, const InfluenceMatrix& mat, double theta) {
  const std::size_t num_slots = mat.num_slots();
  const std::size_t num_users = mat.num_users();
  const std::size_t num_products = inst.num_products();
  if (mat.num_products() != num_products || num_slots != inst.num_slots()) {
    throw StructuralError("influence matrix does not match the instance");
  }

  LpModel model;
  model.theta = theta;
  std::vector<int32_t> x_var(num_slots * num_products, -1);
  std::vector<int32_t> y_var(num_users * num_products, -1);

  for (SlotIndex s : index_range<SlotIndex>(num_slots)) {
    for (ProductIndex i : index_range<ProductIndex>(num_products)) {
      const auto users = mat.slot_users(s);
      const bool reaches = std::any_of(users.begin(), users.end(),
                                       [&](const SlotUserEntry& e) { return mat.interested(e.user, i); });
      if (!reaches) continue;
      x_var[s.pos() * num_products + i.pos()] = static_cast<int32_t>(model.variables.size());
      model.variables.push_back(LpVariable{LpVarKind::kSlotProduct, s.value(), i, 0.0});
    }
  }
  model.num_x = model.variables.size();
  for (UserIndex u : index_range<UserIndex>(num_users)) {
    for (ProductIndex i : index_range<ProductIndex>(num_products)) {
      if (!mat.interested(u, i)) continue;
      y_var[u.pos() * num_products + i.pos()] = static_cast<int32_t>(model.variables.size());
      model.variables.push_back(LpVariable{LpVarKind::kUserProduct, u.value(), i, 1.0});
    }
  }
  model.num_y = model.variables.size() - model.num_x;

  for (ProductIndex i : index_range<ProductIndex>(num_products)) {
    LpRow row{LpRowFamily::kBudget, i.value(), -1, {}, static_cast<double>(inst.products[i].budget)};
    for (SlotIndex s : index_range<SlotIndex>(num_slots)) {
      const int32_t v = x_var[s.pos() * num_products + i.pos()];
      if (v >= 0) row.terms.push_back({v, 1.0});
    }
    model.rows.push_back(std::move(row));
  }
  for (SlotIndex s : index_range<SlotIndex>(num_slots)) {
    LpRow row{LpRowFamily::kDisjointness, s.value(), -1, {}, 1.0};
    for (ProductIndex i : index_range<ProductIndex>(num_products)) {
      const int32_t v = x_var[s.pos() * num_products + i.pos()];
      if (v >= 0) row.terms.push_back({v, 1.0});
    }
    model.rows.push_back(std::move(row));
  }
  for (UserIndex u : index_range<UserIndex>(num_users)) {
    for (ProductIndex i : index_range<ProductIndex>(num_products)) {
      const int32_t y = y_var[u.pos() * num_products + i.pos()];
      if (y < 0) continue;
      LpRow row{LpRowFamily::kLinking, u.value(), i.value(), {{y, 1.0}}, 0.0};
      for (const UserSlotEntry& e : mat.user_slots(u)) {
        const int32_t x = x_var[e.slot.pos() * num_products + i.pos()];
        if (x >= 0) row.terms.push_back({x, -e.p});
      }
      model.rows.push_back(std::move(row));
    }
  }
  if (std::isfinite(theta)) {
    for (ProductIndex i : index_range<ProductIndex>(num_products)) {
      for (ProductIndex j : index_range<ProductIndex>(num_products)) {
        if (i == j) continue;
        LpRow row{LpRowFamily::kBalance, i.value(), j.value(), {}, theta};
        for (UserIndex u : mat.product_users(i)) {
          row.terms.push_back({y_var[u.pos() * num_products + i.pos()], 1.0});
        }
        for (UserIndex u : mat.product_users(j)) {
          row.terms.push_back({y_var[u.pos() * num_products + j.pos()], -1.0});
        }
        model.rows.push_back(std::move(row));
      }
    }
  }
  return model;
}

namespace {

constexpr double kZeroSnap = 1e-9;

struct Translation {
  SparseLp lp;
  std::size_t num_model_vars = 0;
};

// Turns the model into the engine's column form. Rows that cannot bind are
// dropped (empty rows, single-entry disjointness rows implied by x <= 1), y
// variables with nothing to link to are fixed at zero, and the balance rows
// optionally go through per-product aggregate variables.
Translation translate(const LpModel& model, bool aggregate_balance) {
  const std::size_t nv = model.variables.size();
  std::vector<double> upper(nv, 1.0);
  std::vector<std::vector<std::pair<int32_t, double>>> columns(nv);
  Translation out;
  SparseLp& lp = out.lp;

  for (const LpRow& row : model.rows) {
    if (row.terms.empty()) continue;
    if (row.family == LpRowFamily::kDisjointness && row.terms.size() == 1 && row.rhs >= 1.0) {
      continue;
    }
    if (row.family == LpRowFamily::kLinking && row.terms.size() == 1) {
      upper[row.terms.front().var] = 0.0;
      continue;
    }
    if (row.family == LpRowFamily::kBalance && aggregate_balance) continue;
    const int32_t r = lp.add_row(row.rhs, RowSense::kLessEqual);
    for (const LpTerm& t : row.terms) columns[t.var].emplace_back(r, t.coef);
  }

  std::vector<int32_t> aggregate_row;
  std::vector<double> aggregate_size;
  const bool has_balance = model.count_rows(LpRowFamily::kBalance) > 0;
  if (aggregate_balance && has_balance) {
    int32_t num_products = 0;
    for (const LpVariable& v : model.variables) num_products = std::max(num_products, v.product.value() + 1);
    for (const LpRow& row : model.rows) {
      if (row.family == LpRowFamily::kBalance) {
        num_products = std::max({num_products, row.first + 1, row.second + 1});
      }
    }
    aggregate_row.resize(num_products);
    aggregate_size.assign(num_products, 0.0);
    for (int32_t i = 0; i < num_products; ++i) aggregate_row[i] = lp.add_row(0.0, RowSense::kEqual);
    for (std::size_t v = 0; v < nv; ++v) {
      const LpVariable& var = model.variables[v];
      if (var.kind != LpVarKind::kUserProduct) continue;
      aggregate_size[var.product.pos()] += 1.0;
      if (upper[v] > 0.0) columns[v].emplace_back(aggregate_row[var.product.pos()], 1.0);
    }
  }

  std::vector<int32_t> rows;
  std::vector<double> values;
  for (std::size_t v = 0; v < nv; ++v) {
    rows.clear();
    values.clear();
    for (const auto& [r, c] : columns[v]) {
      rows.push_back(r);
      values.push_back(c);
    }
    lp.add_column(-model.variables[v].objective, 0.0, upper[v], rows, values);
  }
  out.num_model_vars = nv;

  if (aggregate_balance && has_balance) {
    const std::size_t num_products = aggregate_row.size();
    std::vector<std::vector<std::pair<int32_t, double>>> agg_columns(num_products);
    for (std::size_t i = 0; i < num_products; ++i) {
      agg_columns[i].emplace_back(aggregate_row[i], -1.0);
    }
    for (const LpRow& row : model.rows) {
      if (row.family != LpRowFamily::kBalance) continue;
      const int32_t r = lp.add_row(row.rhs, RowSense::kLessEqual);
      agg_columns[row.first].emplace_back(r, 1.0);
      agg_columns[row.second].emplace_back(r, -1.0);
    }
    for (std::size_t i = 0; i < num_products; ++i) {
      rows.clear();
      values.clear();
      for (const auto& [r, c] : agg_columns[i]) {
        rows.push_back(r);
        values.push_back(c);
      }
      lp.add_column(0.0, 0.0, aggregate_size[i], rows, values);
    }
  }
  return out;
}

FractionalSolution solve_translated(const LpModel& model, const Translation& t, LpSolver& solver) {
  FractionalSolution sol;
  solver.load(t.lp);
  sol.status = solver.solve();
  sol.iterations = solver.iterations();
  if (sol.status == LpStatus::kInfeasible) {
    // x = y = 0 satisfies every row of this family.
    throw SolverError("relaxation reported infeasible");
  }
  const std::span<const double> primal = solver.primal();
  double objective = 0.0;
  for (std::size_t v = 0; v < t.num_model_vars; ++v) {
    double value = std::clamp(primal[v], 0.0, 1.0);
    // Interior points approach zero without reaching it.
    if (value < kZeroSnap) value = 0.0;
    const LpVariable& var = model.variables[v];
    objective += var.objective * value;
    if (value <= 0.0) continue;
    if (var.kind == LpVarKind::kSlotProduct) {
      sol.x_star.push_back(XValue{SlotIndex(var.entity), var.product, value});
    } else {
      sol.y_star.push_back(YValue{UserIndex(var.entity), var.product, value});
    }
  }
  sol.objective_value = objective;
  return sol;
}

}  // namespace

FractionalSolution solve_lp(const LpModel& model, const LpRelaxOptions& options) {
  if (model.variables.empty()) return {};
  const Translation t = translate(model, options.aggregate_balance);
  bool interior = options.method == LpMethod::kInteriorPoint;
  if (options.method == LpMethod::kAuto) interior = t.lp.num_rows > options.ipm_row_threshold;
  if (interior) {
    InteriorPoint solver(options.interior_point);
    return solve_translated(model, t, solver);
  }
  RevisedSimplex solver(options.simplex);
  return solve_translated(model, t, solver);
}

FractionalSolution solve_lp(const LpModel& model, LpSolver& solver, bool aggregate_balance) {
  if (model.variables.empty()) return {};
  return solve_translated(model, translate(model, aggregate_balance), solver);
}

double lp_upper_bound(const FractionalSolution& sol) {
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError("LP bound requested from a non-optimal solve (" +
                      std::string(to_string(sol.status)) + ")");
  }
  return sol.objective_value;
}

std::vector<double> model_values(const LpModel& model, const FractionalSolution& sol) {
  std::vector<double> values(model.variables.size(), 0.0);
  // Both the model and the solution list x then y in the same order.
  std::size_t xi = 0;
  std::size_t yi = 0;
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    const LpVariable& var = model.variables[v];
    if (var.kind == LpVarKind::kSlotProduct) {
      if (xi < sol.x_star.size() && sol.x_star[xi].slot.value() == var.entity &&
          sol.x_star[xi].product == var.product) {
        values[v] = sol.x_star[xi++].value;
      }
    } else if (yi < sol.y_star.size() && sol.y_star[yi].user.value() == var.entity &&
               sol.y_star[yi].product == var.product) {
      values[v] = sol.y_star[yi++].value;
    }
  }
  return values;
}

double max_violation(const LpModel& model, const std::vector<double>& values) {
  double worst = 0.0;
  for (double v : values) worst = std::max({worst, -v, v - 1.0});
  for (const LpRow& row : model.rows) {
    double lhs = 0.0;
    for (const LpTerm& t : row.terms) lhs += t.coef * values[t.var];
    worst = std::max(worst, lhs - row.rhs);
  }
  return worst;
}

void write_lp(std::ostream& out, const LpModel& model, const Instance& inst) {
  auto name = [&](int32_t v) {
    const LpVariable& var = model.variables[v];
    const std::string& product = inst.products[var.product].id;
    if (var.kind == LpVarKind::kSlotProduct) {
      return "x_" + inst.slots[SlotIndex(var.entity)].slot_id + "_" + product;
    }
    return "y_" + inst.users[UserIndex(var.entity)].id + "_" + product;
  };
  auto write_terms = [&](const std::vector<LpTerm>& terms) {
    int on_line = 0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const LpTerm& t = terms[k];
      const char* sign = t.coef < 0 ? "-" : (k == 0 ? "" : "+");
      out << (k == 0 ? "" : " ") << sign << (k == 0 && t.coef >= 0 ? "" : " ");
      if (std::abs(t.coef) != 1.0) out << format_number(std::abs(t.coef)) << ' ';
      out << name(t.var);
      if (++on_line == 8 && k + 1 < terms.size()) {
        out << "\n   ";
        on_line = 0;
      }
    }
  };

  out << "\\ bballoc linear relaxation\n";
  out << "Maximize\n obj:";
  std::vector<LpTerm> objective;
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    if (model.variables[v].objective != 0.0) {
      objective.push_back({static_cast<int32_t>(v), model.variables[v].objective});
    }
  }
  if (!objective.empty()) {
    out << ' ';
    write_terms(objective);
  }
  out << "\nSubject To\n";
  for (const LpRow& row : model.rows) {
    if (row.terms.empty()) continue;
    switch (row.family) {
      case LpRowFamily::kBudget:
        out << " budget_" << inst.products[ProductIndex(row.first)].id << ": ";
        break;
      case LpRowFamily::kDisjointness:
        out << " disjoint_" << inst.slots[SlotIndex(row.first)].slot_id << ": ";
        break;
      case LpRowFamily::kLinking:
        out << " link_" << inst.users[UserIndex(row.first)].id << "_"
            << inst.products[ProductIndex(row.second)].id << ": ";
        break;
      case LpRowFamily::kBalance:
        out << " balance_" << inst.products[ProductIndex(row.first)].id << "_"
            << inst.products[ProductIndex(row.second)].id << ": ";
        break;
    }
    write_terms(row.terms);
    out << " <= " << format_number(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    out << " 0 <= " << name(static_cast<int32_t>(v)) << " <= 1\n";
  }
  out << "End\n";
}

}  // namespace bballoc
