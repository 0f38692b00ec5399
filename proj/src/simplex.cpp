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

#include "bballoc/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "bballoc/errors.hpp"

namespace bballoc {

int32_t SparseLp::add_row(double rhs_value, RowSense row_sense) {
  rhs.push_back(rhs_value);
  sense.push_back(row_sense);
  return static_cast<int32_t>(num_rows++);
}

int32_t SparseLp::add_column(double cost_value, double lower_bound, double upper_bound,
                             std::span<const int32_t> rows, std::span<const double> values) {
  cost.push_back(cost_value);
  lower.push_back(lower_bound);
  upper.push_back(upper_bound);
  row_index.insert(row_index.end(), rows.begin(), rows.end());
  value.insert(value.end(), values.begin(), values.end());
  col_start.push_back(row_index.size());
  return static_cast<int32_t>(cost.size() - 1);
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

using Vector = Eigen::VectorXd;

// B^{-1} for the last refactorized basis followed by a file of eta columns,
// one per basis change since then.
//
// Refactorization first peels off column singletons and then row singletons,
// which for these models covers nearly all of the basis (slack columns are
// column singletons). With rows and columns permuted into pivot order the
// basis is block upper triangular,
//
//   [ U  *  * ]
//   [ 0  K  * ]
//   [ 0  0  L ]
//
// with U upper and L lower triangular. Only the kernel K goes through a
// general sparse LU; the triangular blocks are solved in place and skip zero
// entries, which keeps the mostly very sparse simplex vectors cheap.
class BasisFactor {
 public:
  bool factorize(const SparseLp& lp, std::span<const int32_t> basis) {
    const auto m = static_cast<int32_t>(lp.num_rows);
    const auto n = static_cast<int32_t>(lp.num_cols());
    etas_.clear();
    eta_nonzeros_ = 0;
    m_ = m;

    // Basis columns in CSC form, indexed by basis position.
    start_.assign(1, 0);
    index_.clear();
    value_.clear();
    for (const int32_t var : basis) {
      if (var >= n) {
        index_.push_back(var - n);
        value_.push_back(1.0);
      } else {
        for (std::size_t k = lp.col_start[var]; k < lp.col_start[var + 1]; ++k) {
          if (lp.value[k] == 0.0) continue;
          index_.push_back(lp.row_index[k]);
          value_.push_back(lp.value[k]);
        }
      }
      start_.push_back(index_.size());
    }
    // Row-wise pattern: the basis positions touching each row.
    std::vector<std::size_t> row_start(static_cast<std::size_t>(m) + 1, 0);
    for (int32_t r : index_) ++row_start[r + 1];
    for (int32_t r = 0; r < m; ++r) row_start[r + 1] += row_start[r];
    std::vector<int32_t> row_cols(index_.size());
    {
      std::vector<std::size_t> fill(row_start.begin(), row_start.end() - 1);
      for (int32_t c = 0; c < m; ++c) {
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) row_cols[fill[index_[k]]++] = c;
      }
    }

    std::vector<char> row_active(m, 1);
    std::vector<char> col_active(m, 1);
    std::vector<int32_t> count(m);
    std::vector<int32_t> queue;
    upper_.clear();
    lower_.clear();

    // Column singletons.
    for (int32_t c = 0; c < m; ++c) {
      count[c] = static_cast<int32_t>(start_[c + 1] - start_[c]);
      if (count[c] == 0) return false;
      if (count[c] == 1) queue.push_back(c);
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int32_t c = queue[q];
      if (!col_active[c] || count[c] != 1) continue;
      std::size_t at = start_[c];
      while (!row_active[index_[at]]) ++at;
      const int32_t r = index_[at];
      upper_.push_back({r, c, value_[at]});
      row_active[r] = 0;
      col_active[c] = 0;
      for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) {
        const int32_t other = row_cols[k];
        if (!col_active[other]) continue;
        if (--count[other] == 0) return false;
        if (count[other] == 1) queue.push_back(other);
      }
    }

    // Row singletons among what is left.
    queue.clear();
    for (int32_t r = 0; r < m; ++r) {
      if (!row_active[r]) continue;
      count[r] = 0;
      for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) count[r] += col_active[row_cols[k]];
      if (count[r] == 0) return false;
      if (count[r] == 1) queue.push_back(r);
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int32_t r = queue[q];
      if (!row_active[r] || count[r] != 1) continue;
      std::size_t at = row_start[r];
      while (!col_active[row_cols[at]]) ++at;
      const int32_t c = row_cols[at];
      double pivot = 0.0;
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        if (index_[k] == r) pivot = value_[k];
      }
      lower_.push_back({r, c, pivot});
      row_active[r] = 0;
      col_active[c] = 0;
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        const int32_t other = index_[k];
        if (!row_active[other]) continue;
        if (--count[other] == 0) return false;
        if (count[other] == 1) queue.push_back(other);
      }
    }

    // Kernel.
    kernel_rows_.clear();
    kernel_cols_.clear();
    kernel_index_.assign(m, -1);
    for (int32_t r = 0; r < m; ++r) {
      if (row_active[r]) {
        kernel_index_[r] = static_cast<int32_t>(kernel_rows_.size());
        kernel_rows_.push_back(r);
      }
    }
    for (int32_t c = 0; c < m; ++c) {
      if (col_active[c]) kernel_cols_.push_back(c);
    }
    if (kernel_rows_.size() != kernel_cols_.size()) return false;
    for (const Pivot& p : upper_) {
      if (p.value == 0.0) return false;
    }
    for (const Pivot& p : lower_) {
      if (p.value == 0.0) return false;
    }
    if (kernel_cols_.empty()) return true;

    const auto size = static_cast<Eigen::Index>(kernel_cols_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index k = 0; k < size; ++k) {
      const int32_t c = kernel_cols_[k];
      for (std::size_t e = start_[c]; e < start_[c + 1]; ++e) {
        const int32_t kr = kernel_index_[index_[e]];
        if (kr >= 0) triplets.emplace_back(kr, static_cast<int>(k), value_[e]);
      }
    }
    Eigen::SparseMatrix<double> kernel(size, size);
    kernel.setFromTriplets(triplets.begin(), triplets.end());
    kernel.makeCompressed();
    lu_.analyzePattern(kernel);
    lu_.factorize(kernel);
    return lu_.info() == Eigen::Success;
  }

  // v <- B^{-1} v; v is indexed by row on input and by basis position on
  // output.
  void ftran(Vector& v) const {
    Vector& b = v;
    Vector& x = scratch_;
    x.setZero(m_);
    auto eliminate = [&](int32_t c, int32_t skip, double xv) {
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        if (index_[k] != skip) b[index_[k]] -= value_[k] * xv;
      }
    };
    for (const Pivot& p : lower_) {
      const double xv = b[p.row] / p.value;
      if (xv == 0.0) continue;
      x[p.col] = xv;
      eliminate(p.col, p.row, xv);
    }
    if (!kernel_cols_.empty()) {
      Vector rhs(static_cast<Eigen::Index>(kernel_rows_.size()));
      bool any = false;
      for (std::size_t k = 0; k < kernel_rows_.size(); ++k) {
        rhs[k] = b[kernel_rows_[k]];
        any = any || rhs[k] != 0.0;
      }
      if (any) {
        const Vector sol = lu_.solve(rhs);
        for (std::size_t k = 0; k < kernel_cols_.size(); ++k) {
          const double xv = sol[k];
          if (xv == 0.0) continue;
          const int32_t c = kernel_cols_[k];
          x[c] = xv;
          for (std::size_t e = start_[c]; e < start_[c + 1]; ++e) {
            if (kernel_index_[index_[e]] < 0) b[index_[e]] -= value_[e] * xv;
          }
        }
      }
    }
    for (auto it = upper_.rbegin(); it != upper_.rend(); ++it) {
      const double xv = b[it->row] / it->value;
      if (xv == 0.0) continue;
      x[it->col] = xv;
      eliminate(it->col, it->row, xv);
    }
    v.swap(x);

    for (const Eta& eta : etas_) {
      const double pivot_value = v[eta.row] / eta.pivot;
      v[eta.row] = pivot_value;
      if (pivot_value == 0.0) continue;
      for (const auto& [row, coef] : eta.entries) v[row] -= coef * pivot_value;
    }
  }

  // v' <- v' B^{-1}; v is indexed by basis position on input and by row on
  // output.
  void btran(Vector& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = v[it->row];
      for (const auto& [row, coef] : it->entries) acc -= coef * v[row];
      v[it->row] = acc / it->pivot;
    }

    Vector& y = scratch_;
    y.setZero(m_);
    auto residual = [&](int32_t c, int32_t skip) {
      double s = v[c];
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        if (index_[k] != skip) s -= value_[k] * y[index_[k]];
      }
      return s;
    };
    for (const Pivot& p : upper_) y[p.row] = residual(p.col, p.row) / p.value;
    if (!kernel_cols_.empty()) {
      Vector rhs(static_cast<Eigen::Index>(kernel_cols_.size()));
      bool any = false;
      for (std::size_t k = 0; k < kernel_cols_.size(); ++k) {
        const int32_t c = kernel_cols_[k];
        double s = v[c];
        for (std::size_t e = start_[c]; e < start_[c + 1]; ++e) {
          if (kernel_index_[index_[e]] < 0) s -= value_[e] * y[index_[e]];
        }
        rhs[k] = s;
        any = any || s != 0.0;
      }
      if (any) {
        const Vector sol = lu_.transpose().solve(rhs);
        for (std::size_t k = 0; k < kernel_rows_.size(); ++k) y[kernel_rows_[k]] = sol[k];
      }
    }
    for (auto it = lower_.rbegin(); it != lower_.rend(); ++it) {
      y[it->row] = residual(it->col, it->row) / it->value;
    }
    v.swap(y);
  }

  void push_eta(int32_t row, const Vector& alpha, double drop) {
    Eta eta{row, alpha[row], {}};
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
      if (i != row && std::abs(alpha[i]) > drop) {
        eta.entries.emplace_back(static_cast<int32_t>(i), alpha[i]);
      }
    }
    eta_nonzeros_ += eta.entries.size();
    etas_.push_back(std::move(eta));
  }

  std::size_t num_etas() const { return etas_.size(); }
  std::size_t eta_nonzeros() const { return eta_nonzeros_; }

 private:
  struct Pivot {
    int32_t row;
    int32_t col;
    double value;
  };
  struct Eta {
    int32_t row;
    double pivot;
    std::vector<std::pair<int32_t, double>> entries;
  };

  int32_t m_ = 0;
  std::vector<std::size_t> start_;
  std::vector<int32_t> index_;
  std::vector<double> value_;
  std::vector<Pivot> upper_;
  std::vector<Pivot> lower_;
  std::vector<int32_t> kernel_rows_;
  std::vector<int32_t> kernel_cols_;
  std::vector<int32_t> kernel_index_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  mutable Vector scratch_;
  std::vector<Eta> etas_;
  std::size_t eta_nonzeros_ = 0;
};

enum class VarState : uint8_t { kBasic, kAtLower, kAtUpper };

}  // namespace

class RevisedSimplex::Impl {
 public:
  explicit Impl(SimplexOptions options) : opt_(options) {}

  void load(const SparseLp& lp) {
    if (lp.rhs.size() != lp.num_rows || lp.sense.size() != lp.num_rows ||
        lp.col_start.size() != lp.num_cols() + 1) {
      throw SolverError("malformed sparse LP");
    }
    lp_ = lp;
    n_ = static_cast<int32_t>(lp.num_cols());
    m_ = static_cast<int32_t>(lp.num_rows);
    const std::size_t total = static_cast<std::size_t>(n_) + static_cast<std::size_t>(m_);
    cost_.assign(total, 0.0);
    lower_.assign(total, 0.0);
    upper_.assign(total, kLpInfinity);
    for (int32_t j = 0; j < n_; ++j) {
      if (!std::isfinite(lp.lower[j])) throw SolverError("column without finite lower bound");
      cost_[j] = lp.cost[j];
      lower_[j] = lp.lower[j];
      upper_[j] = lp.upper[j];
    }
    for (int32_t r = 0; r < m_; ++r) {
      if (lp.sense[r] == RowSense::kEqual) upper_[n_ + r] = 0.0;
    }
    row_start_.assign(static_cast<std::size_t>(m_) + 1, 0);
    for (int32_t r : lp.row_index) ++row_start_[r + 1];
    for (int32_t r = 0; r < m_; ++r) row_start_[r + 1] += row_start_[r];
    row_col_.resize(lp.row_index.size());
    row_value_.resize(lp.row_index.size());
    std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
    for (int32_t j = 0; j < n_; ++j) {
      for (std::size_t k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        const std::size_t at = fill[lp.row_index[k]]++;
        row_col_[at] = j;
        row_value_[at] = lp.value[k];
      }
    }
    iterations_ = 0;
    objective_ = 0.0;
    loaded_ = true;
  }

  LpStatus solve() {
    if (!loaded_) throw SolverError("solve() called before load()");
    iterations_ = 0;
    limit_ = opt_.max_iterations > 0 ? opt_.max_iterations
                                     : std::max<int64_t>(20000, 50LL * (n_ + m_));
    const auto total = static_cast<int32_t>(cost_.size());
    work_cost_ = cost_;
    d_.assign(total, 0.0);
    row_.assign(total, 0.0);
    row_touched_.clear();
    reset_to_logical_basis();
    if (!refactor()) throw SolverError("identity basis failed to factorize");

    if (opt_.algorithm == SimplexAlgorithm::kDual && start_dual_feasible()) {
      if (opt_.perturb_costs) perturb_costs();
      compute_primal();
      compute_reduced_costs();
      const LpStatus status = run_dual();
      if (status != LpStatus::kOptimal) return finish(status);
      if (work_cost_ != cost_) {
        work_cost_ = cost_;
        compute_reduced_costs();
      }
      // Any dual infeasibility left by the perturbation or the Harris
      // tolerances is removed by primal iterations from the optimal basis.
      return finish(run_primal());
    }

    compute_primal();
    if (max_primal_infeasibility() > opt_.feasibility_tolerance) {
      return finish(LpStatus::kInfeasible);
    }
    compute_reduced_costs();
    return finish(run_primal());
  }

  std::span<const double> primal() const { return {x_.data(), static_cast<std::size_t>(n_)}; }
  double objective() const { return objective_; }
  int64_t iterations() const { return iterations_; }

 private:
  static constexpr int32_t kBoundFlip = -1;
  static constexpr int32_t kUnbounded = -2;

  LpStatus finish(LpStatus status) {
    objective_ = 0.0;
    for (int32_t j = 0; j < n_; ++j) objective_ += cost_[j] * x_[j];
    return status;
  }

  void reset_to_logical_basis() {
    const std::size_t total = cost_.size();
    state_.assign(total, VarState::kAtLower);
    x_.assign(total, 0.0);
    for (int32_t j = 0; j < n_; ++j) x_[j] = lower_[j];
    basis_.resize(m_);
    for (int32_t r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      state_[n_ + r] = VarState::kBasic;
    }
  }

  bool refactor() { return factor_.factorize(lp_, basis_); }

  // Refactorizes when the eta file is long, then refreshes x_B and d.
  void maybe_refactor() {
    if (factor_.num_etas() < static_cast<std::size_t>(opt_.refactor_interval) &&
        factor_.eta_nonzeros() <= 4 * static_cast<std::size_t>(m_) + 1000) {
      return;
    }
    if (!refactor()) throw SolverError("basis became singular");
    compute_primal();
    compute_reduced_costs();
  }

  void column(int32_t var, Vector& out) const {
    out.setZero();
    if (var >= n_) {
      out[var - n_] = 1.0;
      return;
    }
    for (std::size_t k = lp_.col_start[var]; k < lp_.col_start[var + 1]; ++k) {
      out[lp_.row_index[k]] = lp_.value[k];
    }
  }

  // x_B = B^{-1} (b - N x_N)
  void compute_primal() {
    Vector v(m_);
    for (int32_t r = 0; r < m_; ++r) v[r] = lp_.rhs[r];
    for (int32_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
        v[lp_.row_index[k]] -= lp_.value[k] * x_[j];
      }
    }
    for (int32_t r = 0; r < m_; ++r) {
      const int32_t var = n_ + r;
      if (state_[var] != VarState::kBasic) v[r] -= x_[var];
    }
    factor_.ftran(v);
    for (int32_t i = 0; i < m_; ++i) x_[basis_[i]] = v[i];
  }

  // d_j = c_j - pi' a_j with pi' = c_B' B^{-1}.
  void compute_reduced_costs() {
    Vector duals(m_);
    for (int32_t i = 0; i < m_; ++i) duals[i] = work_cost_[basis_[i]];
    factor_.btran(duals);
    for (int32_t j = 0; j < n_; ++j) {
      double d = work_cost_[j];
      for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
        d -= duals[lp_.row_index[k]] * lp_.value[k];
      }
      d_[j] = d;
    }
    for (int32_t r = 0; r < m_; ++r) d_[n_ + r] = work_cost_[n_ + r] - duals[r];
    for (int32_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  // row_[j] = rho' a_j for every column touched by a nonzero of rho.
  void pivot_row(const Vector& rho) {
    auto add = [&](int32_t j, double v) {
      if (row_[j] == 0.0) row_touched_.push_back(j);
      row_[j] += v;
      if (row_[j] == 0.0) row_[j] = 1e-300;  // stays marked as touched
    };
    for (int32_t i = 0; i < m_; ++i) {
      const double r = rho[i];
      if (std::abs(r) <= 1e-14) continue;
      for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
        add(row_col_[k], r * row_value_[k]);
      }
      add(n_ + i, r);
    }
  }

  void clear_row() {
    for (int32_t j : row_touched_) row_[j] = 0.0;
    row_touched_.clear();
  }

  void basis_change(int32_t leave_row, int32_t entering, const Vector& alpha, bool to_lower) {
    const int32_t leaving = basis_[leave_row];
    x_[leaving] = to_lower ? lower_[leaving] : upper_[leaving];
    state_[leaving] = to_lower ? VarState::kAtLower : VarState::kAtUpper;
    basis_[leave_row] = entering;
    state_[entering] = VarState::kBasic;
    factor_.push_eta(leave_row, alpha, 1e-14);
  }

  bool fixed(int32_t j) const { return lower_[j] == upper_[j]; }

  // ---- dual simplex ----

  // With the logical basis every d_j = c_j. Columns with negative cost start
  // at their upper bound; that fails only for an unbounded column.
  bool start_dual_feasible() {
    for (int32_t j = 0; j < n_; ++j) {
      if (cost_[j] >= 0.0) continue;
      if (!std::isfinite(upper_[j])) {
        reset_to_logical_basis();
        return false;
      }
      state_[j] = VarState::kAtUpper;
      x_[j] = upper_[j];
    }
    return true;
  }

  // Deterministic cost shifts that keep the start dual feasible and break the
  // ties among the many zero-cost columns.
  void perturb_costs() {
    for (int32_t j = 0; j < n_; ++j) {
      if (fixed(j)) continue;
      const double scale = 1.0 + std::abs(cost_[j]);
      // Weyl sequence in [0.5, 1.5): spreads the shifts without an RNG.
      const double frac = std::fmod(0.6180339887498949 * static_cast<double>(j + 1), 1.0) + 0.5;
      const double shift = opt_.perturbation * scale * frac;
      work_cost_[j] += state_[j] == VarState::kAtUpper ? -shift : shift;
    }
  }

  struct Candidate {
    int32_t var;
    double ratio;
    double abs_alpha;
    double slack;  // d_j with the sign that dual feasibility wants positive
  };

  LpStatus run_dual() {
    const double ftol = opt_.feasibility_tolerance;
    const double dtol = opt_.optimality_tolerance;
    const double ptol = opt_.pivot_tolerance;
    std::vector<double> weight(m_, 1.0);
    Vector rho(m_);
    Vector alpha(m_);
    Vector tau(m_);
    Vector flips(m_);
    std::vector<Candidate> candidates;
    std::vector<int32_t> flipped;
    bool verified = false;

    while (true) {
      if (iterations_ >= limit_) return LpStatus::kIterationLimit;
      maybe_refactor();

      // Leaving row: largest infeasibility^2 / weight, lowest row on ties.
      int32_t r = -1;
      double best = 0.0;
      double delta = 0.0;
      for (int32_t i = 0; i < m_; ++i) {
        const int32_t b = basis_[i];
        double v = 0.0;
        if (x_[b] < lower_[b] - ftol) v = x_[b] - lower_[b];
        else if (x_[b] > upper_[b] + ftol) v = x_[b] - upper_[b];
        else continue;
        const double score = v * v / weight[i];
        if (score > best) {
          best = score;
          r = i;
          delta = v;
        }
      }
      if (r < 0) {
        if (verified) return LpStatus::kOptimal;
        if (factor_.num_etas() > 0 && !refactor()) throw SolverError("basis singular at optimum");
        compute_primal();
        compute_reduced_costs();
        verified = true;
        continue;
      }
      verified = false;

      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);
      pivot_row(rho);

      // Bound-flipping ratio test. a_j is the row entry oriented so that
      // eligible columns at lower have a_j > 0 and at upper a_j < 0.
      candidates.clear();
      for (int32_t j : row_touched_) {
        if (state_[j] == VarState::kBasic || fixed(j)) continue;
        const double a = delta > 0.0 ? row_[j] : -row_[j];
        if (std::abs(a) <= ptol) continue;
        if (state_[j] == VarState::kAtLower && a > 0.0) {
          candidates.push_back({j, std::max(d_[j], 0.0) / a, a, d_[j]});
        } else if (state_[j] == VarState::kAtUpper && a < 0.0) {
          candidates.push_back({j, std::min(d_[j], 0.0) / a, -a, -d_[j]});
        }
      }
      // Walk the candidates in ratio order (ties by index), flipping each
      // while the slope of the dual objective stays positive. Only a prefix
      // is ever needed, so it is sorted a chunk at a time.
      auto by_ratio = [](const Candidate& p, const Candidate& q) {
        return p.ratio < q.ratio || (p.ratio == q.ratio && p.var < q.var);
      };
      double slope = std::abs(delta);
      flipped.clear();
      std::size_t k = 0;
      std::size_t sorted_end = 0;
      bool stopped = false;
      while (!stopped && k < candidates.size()) {
        if (k == sorted_end) {
          const std::size_t chunk = std::min<std::size_t>(candidates.size() - k, 64);
          const auto first = candidates.begin() + static_cast<std::ptrdiff_t>(k);
          const auto mid = first + static_cast<std::ptrdiff_t>(chunk);
          std::nth_element(first, mid - 1, candidates.end(), by_ratio);
          std::sort(first, mid, by_ratio);
          sorted_end = k + chunk;
        }
        const Candidate& c = candidates[k];
        const double range = upper_[c.var] - lower_[c.var];
        const double after = slope - c.abs_alpha * range;
        if (!std::isfinite(range) || after <= 0.0) {
          stopped = true;
          break;
        }
        slope = after;
        flipped.push_back(c.var);
        ++k;
      }
      int32_t entering = -1;
      double step = 0.0;
      if (stopped) {
        // Harris pass over the rest: the largest pivot among the candidates
        // within the tolerance-relaxed minimum ratio.
        double harris = kLpInfinity;
        for (std::size_t t = k; t < candidates.size(); ++t) {
          const Candidate& c = candidates[t];
          harris = std::min(harris, (c.slack + dtol) / c.abs_alpha);
        }
        harris = std::max(harris, 0.0);
        std::size_t pick = k;
        for (std::size_t t = k; t < candidates.size(); ++t) {
          const Candidate& c = candidates[t];
          if (c.ratio > harris) continue;
          const Candidate& best = candidates[pick];
          if (c.abs_alpha > best.abs_alpha || (c.abs_alpha == best.abs_alpha && c.var < best.var)) {
            pick = t;
          }
        }
        entering = candidates[pick].var;
        step = candidates[pick].ratio;
      }
      if (entering < 0) {
        clear_row();
        return LpStatus::kInfeasible;
      }
      const double alpha_rq = row_[entering];

      column(entering, alpha);
      factor_.ftran(alpha);
      if (std::abs(alpha[r] - alpha_rq) > 1e-7 * (1.0 + std::abs(alpha[r])) ||
          std::abs(alpha[r]) <= ptol) {
        // The row and the column disagree on the pivot. Refactorize and redo
        // the iteration; on a fresh factorization trust the column.
        if (factor_.num_etas() > 0) {
          clear_row();
          if (!refactor()) throw SolverError("basis became singular");
          compute_primal();
          compute_reduced_costs();
          continue;
        }
        if (std::abs(alpha[r]) <= ptol) throw SolverError("unstable pivot on a fresh factorization");
      }

      // Dual update.
      const double t_dual = delta > 0.0 ? step : -step;
      for (int32_t j : row_touched_) {
        if (state_[j] != VarState::kBasic) d_[j] -= t_dual * row_[j];
      }
      d_[basis_[r]] = -t_dual;
      d_[entering] = 0.0;
      clear_row();

      // Bound flips for the groups passed before the entering one.
      if (!flipped.empty()) {
        flips.setZero();
        for (int32_t j : flipped) {
          const bool up = state_[j] == VarState::kAtLower;
          const double move = up ? upper_[j] - lower_[j] : lower_[j] - upper_[j];
          state_[j] = up ? VarState::kAtUpper : VarState::kAtLower;
          x_[j] = up ? upper_[j] : lower_[j];
          if (j >= n_) {
            flips[j - n_] += move;
          } else {
            for (std::size_t e = lp_.col_start[j]; e < lp_.col_start[j + 1]; ++e) {
              flips[lp_.row_index[e]] += lp_.value[e] * move;
            }
          }
        }
        factor_.ftran(flips);
        for (int32_t i = 0; i < m_; ++i) {
          if (flips[i] != 0.0) x_[basis_[i]] -= flips[i];
        }
      }

      // Primal update.
      const int32_t leaving = basis_[r];
      const double target = delta > 0.0 ? upper_[leaving] : lower_[leaving];
      const double theta_p = (x_[leaving] - target) / alpha[r];
      for (int32_t i = 0; i < m_; ++i) {
        if (alpha[i] != 0.0) x_[basis_[i]] -= theta_p * alpha[i];
      }
      x_[entering] += theta_p;

      // Dual steepest-edge weights.
      tau = rho;
      factor_.ftran(tau);
      const double w_r = weight[r];
      for (int32_t i = 0; i < m_; ++i) {
        if (i == r || alpha[i] == 0.0) continue;
        const double kappa = alpha[i] / alpha[r];
        weight[i] = std::max(weight[i] + kappa * (kappa * w_r - 2.0 * tau[i]), 1e-4);
      }
      weight[r] = std::max(w_r / (alpha[r] * alpha[r]), 1e-4);

      basis_change(r, entering, alpha, delta < 0.0);
      ++iterations_;
    }
  }

  // ---- primal simplex ----

  LpStatus run_primal() {
    int degenerate_run = 0;
    bool verified = false;
    std::vector<double> weight(cost_.size(), 1.0);
    Vector alpha(m_);
    Vector rho(m_);

    while (true) {
      if (iterations_ >= limit_) return LpStatus::kIterationLimit;
      maybe_refactor();

      const bool bland = degenerate_run >= opt_.degenerate_limit;
      const int32_t entering = price(weight, bland);
      if (entering < 0) {
        if (verified) break;
        // Confirm optimality on a fresh factorization and fresh reduced costs.
        if (factor_.num_etas() > 0 && !refactor()) {
          throw SolverError("basis singular at optimality check");
        }
        compute_primal();
        compute_reduced_costs();
        verified = true;
        continue;
      }
      verified = false;

      column(entering, alpha);
      factor_.ftran(alpha);
      const double direction = state_[entering] == VarState::kAtLower ? 1.0 : -1.0;

      const auto [leave_row, step] = ratio_test(alpha, entering, direction, bland);
      if (leave_row == kUnbounded) throw SolverError("LP is unbounded");

      x_[entering] += direction * step;
      if (step != 0.0) {
        for (int32_t i = 0; i < m_; ++i) {
          if (alpha[i] != 0.0) x_[basis_[i]] -= direction * step * alpha[i];
        }
      }
      if (leave_row == kBoundFlip) {
        state_[entering] =
            state_[entering] == VarState::kAtLower ? VarState::kAtUpper : VarState::kAtLower;
        x_[entering] = state_[entering] == VarState::kAtLower ? lower_[entering] : upper_[entering];
      } else {
        const int32_t leaving = basis_[leave_row];
        const double pivot = alpha[leave_row];

        // Pivot row of B^{-1} N, then the reduced-cost and devex updates.
        rho.setZero();
        rho[leave_row] = 1.0;
        factor_.btran(rho);
        pivot_row(rho);
        const double ratio = d_[entering] / pivot;
        const double w_q = weight[entering];
        for (int32_t j : row_touched_) {
          if (j == entering || state_[j] == VarState::kBasic) continue;
          const double a = row_[j];
          d_[j] -= ratio * a;
          const double scaled = a / pivot;
          weight[j] = std::max(weight[j], scaled * scaled * w_q);
        }
        clear_row();
        d_[leaving] = -ratio;
        d_[entering] = 0.0;
        weight[leaving] = std::max(w_q / (pivot * pivot), 1.0);
        basis_change(leave_row, entering, alpha, direction * pivot > 0.0);
        if (weight[leaving] > 1e6) std::fill(weight.begin(), weight.end(), 1.0);
      }
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;
      ++iterations_;
    }

    if (max_primal_infeasibility() > opt_.feasibility_tolerance) {
      throw SolverError("simplex lost primal feasibility (" +
                        std::to_string(max_primal_infeasibility()) + ")");
    }
    return LpStatus::kOptimal;
  }

  // Devex: largest d_j^2 / w_j, lowest index on ties. Under stalling, the
  // lowest eligible index.
  int32_t price(const std::vector<double>& weight, bool bland) const {
    const double tol = opt_.optimality_tolerance;
    int32_t best = -1;
    double best_score = 0.0;
    const auto total = static_cast<int32_t>(cost_.size());
    for (int32_t j = 0; j < total; ++j) {
      const VarState st = state_[j];
      if (st == VarState::kBasic || fixed(j)) continue;
      const double d = d_[j];
      const bool improving = (st == VarState::kAtLower && d < -tol) ||
                             (st == VarState::kAtUpper && d > tol);
      if (!improving) continue;
      if (bland) return j;
      const double score = d * d / weight[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  // Returns (row, step), or (kBoundFlip, step) when the entering variable
  // reaches its opposite bound first.
  std::pair<int32_t, double> ratio_test(const Vector& alpha, int32_t entering, double direction,
                                        bool bland) const {
    const double ptol = opt_.pivot_tolerance;
    const double ftol = bland ? 0.0 : opt_.feasibility_tolerance;
    const double flip = upper_[entering] - lower_[entering];

    // Pass 1: the largest step keeping every basic within its relaxed bounds.
    double bound = kLpInfinity;
    for (int32_t i = 0; i < m_; ++i) {
      const double a = direction * alpha[i];
      if (std::abs(a) <= ptol) continue;
      const int32_t b = basis_[i];
      double room;
      if (a > 0.0) {
        room = (x_[b] - lower_[b] + ftol) / a;
      } else {
        if (!std::isfinite(upper_[b])) continue;
        room = (upper_[b] - x_[b] + ftol) / -a;
      }
      bound = std::min(bound, room);
    }
    bound = std::max(bound, 0.0);
    if (flip <= bound) {
      if (!std::isfinite(flip)) return {kUnbounded, 0.0};
      return {kBoundFlip, flip};
    }

    // Pass 2: among rows blocking within that step, the most stable pivot.
    int32_t chosen = -1;
    double chosen_step = 0.0;
    double chosen_pivot = 0.0;
    for (int32_t i = 0; i < m_; ++i) {
      const double a = direction * alpha[i];
      if (std::abs(a) <= ptol) continue;
      const int32_t b = basis_[i];
      double step;
      if (a > 0.0) {
        step = (x_[b] - lower_[b]) / a;
      } else {
        if (!std::isfinite(upper_[b])) continue;
        step = (upper_[b] - x_[b]) / -a;
      }
      step = std::max(step, 0.0);
      if (step > bound) continue;
      bool take;
      if (chosen < 0) {
        take = true;
      } else if (bland) {
        take = step < chosen_step - 1e-12 ||
               (step <= chosen_step + 1e-12 && b < basis_[chosen]);
      } else {
        take = std::abs(a) > chosen_pivot ||
               (std::abs(a) == chosen_pivot && b < basis_[chosen]);
      }
      if (take) {
        chosen = i;
        chosen_step = step;
        chosen_pivot = std::abs(a);
      }
    }
    if (chosen < 0) return {kUnbounded, 0.0};
    return {chosen, chosen_step};
  }

  double max_primal_infeasibility() const {
    double worst = 0.0;
    for (int32_t i = 0; i < m_; ++i) {
      const int32_t b = basis_[i];
      worst = std::max(worst, lower_[b] - x_[b]);
      if (std::isfinite(upper_[b])) worst = std::max(worst, x_[b] - upper_[b]);
    }
    return worst;
  }

  SimplexOptions opt_;
  SparseLp lp_;
  bool loaded_ = false;
  int32_t n_ = 0;
  int32_t m_ = 0;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int32_t> basis_;
  // Row-wise copy of the structural matrix for pivot rows.
  std::vector<std::size_t> row_start_;
  std::vector<int32_t> row_col_;
  std::vector<double> row_value_;
  // Working costs (perturbed during the dual phase) and reduced costs.
  std::vector<double> work_cost_;
  std::vector<double> d_;
  // Dense pivot-row accumulator and the entries it holds.
  std::vector<double> row_;
  std::vector<int32_t> row_touched_;
  BasisFactor factor_;
  int64_t limit_ = 0;
  int64_t iterations_ = 0;
  double objective_ = 0.0;
};

RevisedSimplex::RevisedSimplex(SimplexOptions options)
    : impl_(std::make_unique<Impl>(options)) {}
RevisedSimplex::~RevisedSimplex() = default;
RevisedSimplex::RevisedSimplex(RevisedSimplex&&) noexcept = default;
RevisedSimplex& RevisedSimplex::operator=(RevisedSimplex&&) noexcept = default;

void RevisedSimplex::load(const SparseLp& lp) { impl_->load(lp); }
LpStatus RevisedSimplex::solve() { return impl_->solve(); }
std::span<const double> RevisedSimplex::primal() const { return impl_->primal(); }
double RevisedSimplex::objective() const { return impl_->objective(); }
int64_t RevisedSimplex::iterations() const { return impl_->iterations(); }

}  // namespace bballoc
