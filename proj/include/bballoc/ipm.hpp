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

// Primal-dual interior point engine for the same SparseLp form as the
// simplex. Mehrotra predictor-corrector on the normal equations, factorized
// with a sparse Cholesky each iteration.
//
// The point returned is optimal to the tolerances below but need not be a
// vertex: on a degenerate optimal face it lies near the face's center.

#ifndef BBALLOC_IPM_HPP_
#define BBALLOC_IPM_HPP_

#include <cstdint>
#include <memory>
#include <span>

#include "bballoc/simplex.hpp"

namespace bballoc {

struct InteriorPointOptions {
  // Relative primal and dual residuals, scaled by 1 + the largest rhs, bound
  // or cost magnitude.
  double feasibility_tolerance = 1e-9;
  // |primal - dual| / (1 + |primal|).
  double gap_tolerance = 1e-11;
  int max_iterations = 200;
};

class InteriorPoint final : public LpSolver {
 public:
  explicit InteriorPoint(InteriorPointOptions options = {});
  ~InteriorPoint() override;
  InteriorPoint(InteriorPoint&&) noexcept;
  InteriorPoint& operator=(InteriorPoint&&) noexcept;

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

#endif  // BBALLOC_IPM_HPP_
