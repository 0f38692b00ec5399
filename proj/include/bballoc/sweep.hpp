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

// Parameter sweeps over generated instances.
//
// A sweep spec is JSON:
//
//   {
//     "axis": "theta",
//     "values": [0.02, 0.05, 0.1, 0.2],
//     "algorithms": ["lp-rr", "greedy", "random", "topk"],
//     "seeds": [1, 2, 3],
//     "fixed": { "billboards": 84, "users": 1000, "products": 5 }
//   }
//
// Each seed generates one instance per axis value (instance seed = solver
// seed) and every algorithm runs on it.

#ifndef BBALLOC_SWEEP_HPP_
#define BBALLOC_SWEEP_HPP_

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bballoc/datagen.hpp"
#include "bballoc/runner.hpp"

namespace bballoc {

inline constexpr std::string_view kSweepAxes[] = {"alpha", "beta",       "epsilon",        "theta",
                                                  "lambda", "n_products", "trajectory_size"};

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  GenParams fixed;
  std::vector<Algorithm> algorithms;
  std::vector<uint64_t> seeds;
  SolveOptions solve;  // seed and epsilon are filled per run
};

// Throws DataError naming the offending field.
SweepSpec parse_sweep_spec(std::string_view json_text);

// Sets the axis parameter; integer axes round to the nearest integer.
void apply_axis(GenParams& params, std::string_view axis, double value);

struct ResultRow {
  std::string axis;
  double value = 0.0;
  Algorithm algorithm = Algorithm::kGreedy;
  uint64_t instance_seed = 0;
  uint64_t seed = 0;
  int64_t num_slots = 0;
  double total_influence = 0.0;
  double fairness_gap = 0.0;
  bool balance_satisfied = false;
  double wall_ms = 0.0;
  double matrix_ms = 0.0;
  std::optional<double> lp_objective;
  std::vector<double> per_product;
  std::string error;  // empty on success
};

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

// Runs value x seed x algorithm. `jobs` workers process (value, seed) pairs;
// the rows come back in (value, seed, algorithm) order regardless of jobs.
// A failing run becomes a row with `error` set.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs, const SweepProgress& progress = {});

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

inline constexpr std::string_view kPlotMetrics[] = {"total_influence", "fairness_gap", "wall_ms"};

struct PlotSeries {
  std::string name;
  std::vector<double> mean;  // one per x, nan when no run succeeded
  std::vector<double> sd;    // sample standard deviation, 0 for one run
};

struct PlotTable {
  std::string axis;
  std::string metric;
  std::vector<double> x;
  std::vector<PlotSeries> series;
};

// Mean and sample standard deviation of `metric` per (value, algorithm),
// successful rows only.
PlotTable summarize(const std::vector<ResultRow>& rows, std::string_view metric);

void write_plot_data(std::ostream& out, const PlotTable& table);
PlotTable read_plot_data(std::istream& in, const std::string& source);

}  // namespace bballoc

#endif  // BBALLOC_SWEEP_HPP_
