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

#include "bballoc/ipm.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bballoc/errors.hpp"

namespace bballoc {

// Works on the shifted standard form
//
//   min c'x  s.t.  A x = b,  0 <= x,  x_j + w_j = u_j for the columns with a
//   finite upper bound,
//
// where every inequality row has gained a slack column, lower bounds are
// shifted to zero and fixed columns have been folded into b.
class InteriorPoint::Impl {
 public:
  explicit Impl(InteriorPointOptions options) : opt_(options) {}

  void load(const SparseLp& lp) {
    if (lp.rhs.size() != lp.num_rows || lp.sense.size() != lp.num_rows ||
        lp.col_start.size() != lp.num_cols() + 1) {
      throw SolverError("malformed sparse LP");
    }
    const auto m = static_cast<Eigen::Index>(lp.num_rows);
    const std::size_t n = lp.num_cols();
    num_structural_ = n;
    lower_ = lp.lower;
    upper_orig_ = lp.upper;
    cost_orig_ = lp.cost;
    b_ = Eigen::Map<const Eigen::VectorXd>(lp.rhs.data(), m);
    source_.clear();
    cost_.clear();
    upper_.clear();

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lp.lower[j])) throw SolverError("column without finite lower bound");
      for (std::size_t k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        b_[lp.row_index[k]] -= lp.value[k] * lp.lower[j];
      }
      if (lp.upper[j] <= lp.lower[j]) continue;  // fixed at its lower bound
      const auto col = static_cast<int>(source_.size());
      for (std::size_t k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        triplets.emplace_back(lp.row_index[k], col, lp.value[k]);
      }
      source_.push_back(static_cast<int64_t>(j));
      cost_.push_back(lp.cost[j]);
      upper_.push_back(lp.upper[j] - lp.lower[j]);
    }
    for (Eigen::Index r = 0; r < m; ++r) {
      if (lp.sense[r] != RowSense::kLessEqual) continue;
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(source_.size()), 1.0);
      source_.push_back(-1);
      cost_.push_back(0.0);
      upper_.push_back(kLpInfinity);
    }
    a_.resize(m, static_cast<Eigen::Index>(source_.size()));
    a_.setFromTriplets(triplets.begin(), triplets.end());
    a_.makeCompressed();
    x_.assign(n, 0.0);
    iterations_ = 0;
    objective_ = 0.0;
    loaded_ = true;
  }

  LpStatus solve() {
    if (!loaded_) throw SolverError("solve() called before load()");
    using Vec = Eigen::VectorXd;
    const Eigen::Index m = a_.rows();
    const Eigen::Index n = a_.cols();
    iterations_ = 0;

    const Vec c = Eigen::Map<const Vec>(cost_.data(), n);
    std::vector<char> has_upper(n);
    Vec u = Vec::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      has_upper[k] = std::isfinite(upper_[k]);
      if (has_upper[k]) u[k] = upper_[k];
    }

    Vec x(n), z(n), w = Vec::Zero(n), v = Vec::Zero(n), y = Vec::Zero(m);
    for (Eigen::Index k = 0; k < n; ++k) {
      x[k] = has_upper[k] ? 0.5 * u[k] : 1.0;
      z[k] = 1.0;
      if (has_upper[k]) {
        w[k] = u[k] - x[k];
        v[k] = 1.0;
      }
    }
    const double count = static_cast<double>(n) +
                         static_cast<double>(std::count(has_upper.begin(), has_upper.end(), 1));
    const double b_scale = 1.0 + (m > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);
    const double c_scale = 1.0 + (n > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
    const double u_scale = 1.0 + (n > 0 ? u.cwiseAbs().maxCoeff() : 0.0);

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> chol;
    Eigen::Index analyzed_nonzeros = -1;
    double regularization = 1e-12;
    Vec theta(n), r_p(m), r_d(n), r_u = Vec::Zero(n);
    Vec dx(n), dz(n), dw(n), dv(n), dy(m);
    Vec dx_aff(n), dz_aff(n), dw_aff(n), dv_aff(n), dy_aff(m);
    Vec r_xz(n), r_wv = Vec::Zero(n);

    auto direction = [&](const Vec& rxz, const Vec& rwv, Vec& ox, Vec& oy, Vec& oz, Vec& ow,
                         Vec& ov) {
      Vec rhat(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        rhat[k] = r_d[k] - rxz[k] / x[k];
        if (has_upper[k]) rhat[k] += (rwv[k] - v[k] * r_u[k]) / w[k];
      }
      const Vec rhs = r_p + a_ * theta.cwiseProduct(rhat);
      oy = chol.solve(rhs);
      ox = theta.cwiseProduct(a_.transpose() * oy - rhat);
      for (Eigen::Index k = 0; k < n; ++k) {
        oz[k] = (rxz[k] - z[k] * ox[k]) / x[k];
        if (has_upper[k]) {
          ow[k] = r_u[k] - ox[k];
          ov[k] = (rwv[k] - v[k] * ow[k]) / w[k];
        } else {
          ow[k] = 0.0;
          ov[k] = 0.0;
        }
      }
    };
    auto max_step = [&](const Vec& val, const Vec& d, const Vec& val2, const Vec& d2) {
      double step = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (d[k] < 0.0) step = std::min(step, -val[k] / d[k]);
        if (has_upper[k] && d2[k] < 0.0) step = std::min(step, -val2[k] / d2[k]);
      }
      return step;
    };

    while (true) {
      r_p = b_ - a_ * x;
      r_d = c - a_.transpose() * y - z + v;
      double primal_obj = c.dot(x);
      double dual_obj = b_.dot(y);
      double mu = x.dot(z);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!has_upper[k]) continue;
        r_u[k] = u[k] - x[k] - w[k];
        dual_obj -= u[k] * v[k];
        mu += w[k] * v[k];
      }
      mu /= std::max(count, 1.0);
      const double p_res = (m > 0 ? r_p.cwiseAbs().maxCoeff() : 0.0) / b_scale;
      const double d_res = (n > 0 ? r_d.cwiseAbs().maxCoeff() : 0.0) / c_scale;
      const double u_res = (n > 0 ? r_u.cwiseAbs().maxCoeff() : 0.0) / u_scale;
      const double gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
      if (p_res <= opt_.feasibility_tolerance && d_res <= opt_.feasibility_tolerance &&
          u_res <= opt_.feasibility_tolerance && gap <= opt_.gap_tolerance) {
        return finish(x, LpStatus::kOptimal);
      }
      if (iterations_ >= opt_.max_iterations || !std::isfinite(mu)) {
        return finish(x, LpStatus::kIterationLimit);
      }

      for (Eigen::Index k = 0; k < n; ++k) {
        double inv = z[k] / x[k];
        if (has_upper[k]) inv += v[k] / w[k];
        theta[k] = 1.0 / inv;
      }
      Eigen::SparseMatrix<double> at = a_;
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(at, k); it; ++it) it.valueRef() *= theta[k];
      }
      Eigen::SparseMatrix<double> normal = (at * a_.transpose()).pruned(0.0, 0.0);
      normal = normal.triangularView<Eigen::Lower>();
      for (Eigen::Index r = 0; r < m; ++r) normal.coeffRef(r, r) += 0.0;
      normal.makeCompressed();
      const Eigen::SparseMatrix<double> base = normal;
      while (true) {
        normal = base;
        for (Eigen::Index r = 0; r < m; ++r) normal.coeffRef(r, r) += regularization;
        if (normal.nonZeros() != analyzed_nonzeros) {
          chol.analyzePattern(normal);
          analyzed_nonzeros = normal.nonZeros();
        }
        chol.factorize(normal);
        if (chol.info() == Eigen::Success) break;
        regularization *= 100.0;
        if (regularization > 1e-2) return finish(x, LpStatus::kIterationLimit);
      }

      // Predictor.
      r_xz = -x.cwiseProduct(z);
      for (Eigen::Index k = 0; k < n; ++k) r_wv[k] = has_upper[k] ? -w[k] * v[k] : 0.0;
      direction(r_xz, r_wv, dx_aff, dy_aff, dz_aff, dw_aff, dv_aff);
      const double ap_aff = max_step(x, dx_aff, w, dw_aff);
      const double ad_aff = max_step(z, dz_aff, v, dv_aff);
      double mu_aff = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        mu_aff += (x[k] + ap_aff * dx_aff[k]) * (z[k] + ad_aff * dz_aff[k]);
        if (has_upper[k]) mu_aff += (w[k] + ap_aff * dw_aff[k]) * (v[k] + ad_aff * dv_aff[k]);
      }
      mu_aff /= std::max(count, 1.0);
      const double sigma = std::pow(mu_aff / mu, 3.0);

      // Corrector.
      for (Eigen::Index k = 0; k < n; ++k) {
        r_xz[k] = sigma * mu - x[k] * z[k] - dx_aff[k] * dz_aff[k];
        r_wv[k] = has_upper[k] ? sigma * mu - w[k] * v[k] - dw_aff[k] * dv_aff[k] : 0.0;
      }
      direction(r_xz, r_wv, dx, dy, dz, dw, dv);
      const double ap = std::min(1.0, 0.9995 * max_step(x, dx, w, dw));
      const double ad = std::min(1.0, 0.9995 * max_step(z, dz, v, dv));
      x += ap * dx;
      w += ap * dw;
      y += ad * dy;
      z += ad * dz;
      v += ad * dv;
      ++iterations_;
    }
  }

  std::span<const double> primal() const { return x_; }
  double objective() const { return objective_; }
  int64_t iterations() const { return iterations_; }

 private:
  LpStatus finish(const Eigen::VectorXd& x, LpStatus status) {
    for (std::size_t j = 0; j < num_structural_; ++j) x_[j] = lower_[j];
    for (std::size_t k = 0; k < source_.size(); ++k) {
      if (source_[k] < 0) continue;
      const auto j = static_cast<std::size_t>(source_[k]);
      x_[j] = std::clamp(lower_[j] + x[static_cast<Eigen::Index>(k)], lower_[j], upper_orig_[j]);
    }
    objective_ = 0.0;
    for (std::size_t j = 0; j < num_structural_; ++j) objective_ += cost_orig_[j] * x_[j];
    return status;
  }

  InteriorPointOptions opt_;
  bool loaded_ = false;
  std::size_t num_structural_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_orig_;
  std::vector<double> cost_orig_;
  Eigen::SparseMatrix<double> a_;
  Eigen::VectorXd b_;
  // Per engine column: the structural column it came from, or -1 for a slack.
  std::vector<int64_t> source_;
  std::vector<double> cost_;
  std::vector<double> upper_;
  std::vector<double> x_;
  int64_t iterations_ = 0;
  double objective_ = 0.0;
};

InteriorPoint::InteriorPoint(InteriorPointOptions options)
    : impl_(std::make_unique<Impl>(options)) {}
InteriorPoint::~InteriorPoint() = default;
InteriorPoint::InteriorPoint(InteriorPoint&&) noexcept = default;
InteriorPoint& InteriorPoint::operator=(InteriorPoint&&) noexcept = default;

void InteriorPoint::load(const SparseLp& lp) { impl_->load(lp); }
LpStatus InteriorPoint::solve() { return impl_->solve(); }
std::span<const double> InteriorPoint::primal() const { return impl_->primal(); }
double InteriorPoint::objective() const { return impl_->objective(); }
int64_t InteriorPoint::iterations() const { return impl_->iterations(); }

}  // namespace bballoc
