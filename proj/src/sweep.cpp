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

#include "bballoc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "bballoc/errors.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/text.hpp"

namespace bballoc {
namespace {

using nlohmann::json;

double number_field(const json& j, const std::string& key) {
  if (!j.is_number()) throw DataError("sweep field '" + key + "' must be a number");
  return j.get<double>();
}

int64_t integer_field(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw DataError("sweep field '" + key + "' must be an integer");
  return j.get<int64_t>();
}

std::string string_field(const json& j, const std::string& key) {
  if (!j.is_string()) throw DataError("sweep field '" + key + "' must be a string");
  return j.get<std::string>();
}

void apply_fixed(SweepSpec& spec, const json& fixed) {
  if (!fixed.is_object()) throw DataError("sweep field 'fixed' must be an object");
  if (auto it = fixed.find("preset"); it != fixed.end()) {
    const std::string preset = string_field(*it, "preset");
    if (preset == "table") {
      spec.fixed = GenParams::table_preset();
    } else if (preset == "text") {
      spec.fixed = GenParams::text_preset();
    } else {
      throw DataError("unknown preset '" + preset + "'");
    }
  }
  GenParams& p = spec.fixed;
  for (const auto& [key, value] : fixed.items()) {
    if (key == "preset") continue;
    if (key == "billboards") p.num_billboards = integer_field(value, key);
    else if (key == "horizon") p.horizon = integer_field(value, key);
    else if (key == "delta") p.delta = integer_field(value, key);
    else if (key == "users") p.num_users = integer_field(value, key);
    else if (key == "products") p.num_products = integer_field(value, key);
    else if (key == "alpha") p.alpha = number_field(value, key);
    else if (key == "beta") p.beta = number_field(value, key);
    else if (key == "omega_lo") p.omega_lo = number_field(value, key);
    else if (key == "omega_hi") p.omega_hi = number_field(value, key);
    else if (key == "theta") p.theta = number_field(value, key);
    else if (key == "lambda") p.lambda = number_field(value, key);
    else if (key == "epsilon") p.epsilon = number_field(value, key);
    else if (key == "city_extent") p.city_extent = number_field(value, key);
    else if (key == "theta_mode") {
      const auto mode = parse_theta_mode(string_field(value, key));
      if (!mode) throw DataError("unknown theta_mode");
      p.theta_mode = *mode;
    } else if (key == "max_balance_iters") {
      spec.solve.max_balance_iters = integer_field(value, key);
    } else if (key == "product_order") {
      const auto order = parse_product_order(string_field(value, key));
      if (!order) throw DataError("unknown product_order");
      spec.solve.product_order = *order;
    } else if (key == "topk_fill") {
      const auto fill = parse_topk_fill(string_field(value, key));
      if (!fill) throw DataError("unknown topk_fill");
      spec.solve.topk_fill = *fill;
    } else {
      throw DataError("unknown field 'fixed." + key + "'");
    }
  }
}

double stat_of(const ResultRow& row, std::string_view metric) {
  if (metric == "total_influence") return row.total_influence;
  if (metric == "fairness_gap") return row.fairness_gap;
  if (metric == "wall_ms") return row.wall_ms;
  throw DataError("unknown metric '" + std::string(metric) + "'");
}

std::string clean_cell(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return text;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("sweep spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("sweep spec must be a JSON object");
  SweepSpec spec;
  for (const auto& [key, value] : doc.items()) {
    if (key == "axis") {
      spec.axis = string_field(value, key);
    } else if (key == "values") {
      if (!value.is_array()) throw DataError("sweep field 'values' must be an array");
      for (const json& v : value) spec.values.push_back(number_field(v, "values"));
    } else if (key == "algorithms") {
      if (!value.is_array()) throw DataError("sweep field 'algorithms' must be an array");
      for (const json& v : value) {
        const std::string name = string_field(v, "algorithms");
        const auto algo = parse_algorithm(name);
        if (!algo) throw DataError("unknown algorithm '" + name + "'");
        spec.algorithms.push_back(*algo);
      }
    } else if (key == "seeds") {
      if (!value.is_array()) throw DataError("sweep field 'seeds' must be an array");
      for (const json& v : value) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
          throw DataError("sweep seeds must be nonnegative integers");
        }
        spec.seeds.push_back(v.get<uint64_t>());
      }
    } else if (key != "fixed") {
      throw DataError("unknown sweep field '" + key + "'");
    }
  }
  if (auto it = doc.find("fixed"); it != doc.end()) apply_fixed(spec, *it);

  if (std::find(std::begin(kSweepAxes), std::end(kSweepAxes), spec.axis) == std::end(kSweepAxes)) {
    throw DataError("unknown sweep axis '" + spec.axis + "'");
  }
  if (spec.values.empty()) throw DataError("sweep needs at least one value");
  if (spec.algorithms.empty()) spec.algorithms = {Algorithm::kLpRr, Algorithm::kGreedy, Algorithm::kRandom, Algorithm::kTopk};
  if (spec.seeds.empty()) spec.seeds = {1};
  for (double v : spec.values) {
    GenParams probe = spec.fixed;
    apply_axis(probe, spec.axis, v);
    const std::vector<std::string> problems = validate_params(probe);
    if (!problems.empty()) {
      throw DataError("axis value " + format_number(v) + ": " + problems.front());
    }
  }
  return spec;
}

void apply_axis(GenParams& params, std::string_view axis, double value) {
  if (axis == "alpha") params.alpha = value;
  else if (axis == "beta") params.beta = value;
  else if (axis == "epsilon") params.epsilon = value;
  else if (axis == "theta") params.theta = value;
  else if (axis == "lambda") params.lambda = value;
  else if (axis == "n_products") params.num_products = std::llround(value);
  else if (axis == "trajectory_size") params.num_users = std::llround(value);
  else throw DataError("unknown sweep axis '" + std::string(axis) + "'");
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs, const SweepProgress& progress) {
  using Clock = std::chrono::steady_clock;
  const std::size_t num_items = spec.values.size() * spec.seeds.size();
  std::vector<std::vector<ResultRow>> results(num_items);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&]() {
    for (std::size_t item = next++; item < num_items; item = next++) {
      const double value = spec.values[item / spec.seeds.size()];
      const uint64_t seed = spec.seeds[item % spec.seeds.size()];
      GenParams params = spec.fixed;
      apply_axis(params, spec.axis, value);
      params.seed = seed;

      std::vector<ResultRow>& rows = results[item];
      for (Algorithm algo : spec.algorithms) {
        ResultRow row;
        row.axis = spec.axis;
        row.value = value;
        row.algorithm = algo;
        row.instance_seed = seed;
        row.seed = seed;
        rows.push_back(std::move(row));
      }
      try {
        const GeneratedInstance gen = generate_instance(params);
        const auto t0 = Clock::now();
        const InfluenceMatrix mat = build_influence_matrix(gen.instance);
        const double matrix_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        SolveOptions options = spec.solve;
        options.seed = seed;
        options.epsilon = params.epsilon;
        for (ResultRow& row : rows) {
          row.num_slots = static_cast<int64_t>(gen.instance.num_slots());
          row.matrix_ms = matrix_ms;
          try {
            const SolveOutcome outcome = run_solver(gen.instance, mat, row.algorithm, options);
            row.total_influence = outcome.allocation.total_influence();
            row.fairness_gap = outcome.allocation.fairness_gap;
            row.balance_satisfied = outcome.allocation.balance_satisfied;
            row.wall_ms = outcome.wall_ms;
            row.lp_objective = outcome.lp_objective;
            row.per_product.assign(outcome.allocation.per_product_influence.begin(),
                                   outcome.allocation.per_product_influence.end());
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
      } catch (const std::exception& e) {
        for (ResultRow& row : rows) row.error = e.what();
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, num_items);
      }
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), num_items));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  std::vector<ResultRow> rows;
  for (auto& chunk : results) {
    for (ResultRow& row : chunk) rows.push_back(std::move(row));
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "axis,value,algorithm,instance_seed,seed,num_slots,total_influence,fairness_gap,"
         "balance_satisfied,wall_time_ms,matrix_build_ms,lp_objective,per_product_influence,error\n";
  for (const ResultRow& r : rows) {
    out << r.axis << ',' << format_number(r.value) << ',' << to_string(r.algorithm) << ','
        << r.instance_seed << ',' << r.seed << ',' << r.num_slots << ','
        << format_number(r.total_influence) << ',' << format_number(r.fairness_gap) << ','
        << (r.balance_satisfied ? "true" : "false") << ',' << format_number(r.wall_ms) << ','
        << format_number(r.matrix_ms) << ',' << (r.lp_objective ? format_number(*r.lp_objective) : "")
        << ',';
    for (std::size_t k = 0; k < r.per_product.size(); ++k) {
      out << (k ? ";" : "") << format_number(r.per_product[k]);
    }
    out << ',' << clean_cell(r.error) << '\n';
  }
}

PlotTable summarize(const std::vector<ResultRow>& rows, std::string_view metric) {
  PlotTable table;
  table.metric = std::string(metric);
  std::vector<Algorithm> algos;
  for (const ResultRow& r : rows) {
    if (table.axis.empty()) table.axis = r.axis;
    if (std::find(table.x.begin(), table.x.end(), r.value) == table.x.end()) table.x.push_back(r.value);
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) algos.push_back(r.algorithm);
  }
  for (Algorithm a : algos) {
    PlotSeries series;
    series.name = std::string(to_string(a));
    for (double x : table.x) {
      std::vector<double> samples;
      for (const ResultRow& r : rows) {
        if (r.algorithm == a && r.value == x && r.error.empty()) samples.push_back(stat_of(r, metric));
      }
      if (samples.empty()) {
        series.mean.push_back(std::nan(""));
        series.sd.push_back(std::nan(""));
        continue;
      }
      double sum = 0.0;
      for (double s : samples) sum += s;
      const double mean = sum / static_cast<double>(samples.size());
      double ss = 0.0;
      for (double s : samples) ss += (s - mean) * (s - mean);
      series.mean.push_back(mean);
      series.sd.push_back(samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0);
    }
    table.series.push_back(std::move(series));
  }
  return table;
}

void write_plot_data(std::ostream& out, const PlotTable& table) {
  out << "# axis=" << table.axis << " metric=" << table.metric << '\n';
  out << table.axis;
  for (const PlotSeries& s : table.series) out << ' ' << s.name << ".mean " << s.name << ".sd";
  out << '\n';
  for (std::size_t k = 0; k < table.x.size(); ++k) {
    out << format_number(table.x[k]);
    for (const PlotSeries& s : table.series) {
      out << ' ' << format_number(s.mean[k]) << ' ' << format_number(s.sd[k]);
    }
    out << '\n';
  }
}

PlotTable read_plot_data(std::istream& in, const std::string& source) {
  PlotTable table;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  auto fields_of = [](std::string_view text) {
    std::vector<std::string> out;
    for (const std::string& f : split(text, ' ')) {
      if (!trim(f).empty()) out.emplace_back(trim(f));
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      for (const std::string& f : fields_of(text.substr(1))) {
        if (f.rfind("axis=", 0) == 0) table.axis = f.substr(5);
        if (f.rfind("metric=", 0) == 0) table.metric = f.substr(7);
      }
      continue;
    }
    const std::vector<std::string> f = fields_of(text);
    if (!have_header) {
      if (f.empty() || (f.size() - 1) % 2 != 0) {
        throw DataError(source + ":" + std::to_string(number) + ": malformed plot header");
      }
      if (table.axis.empty()) table.axis = f[0];
      for (std::size_t k = 1; k < f.size(); k += 2) {
        const std::size_t dot = f[k].rfind(".mean");
        table.series.push_back(PlotSeries{dot == std::string::npos ? f[k] : f[k].substr(0, dot), {}, {}});
      }
      have_header = true;
      continue;
    }
    if (f.size() != 1 + 2 * table.series.size()) {
      throw DataError(source + ":" + std::to_string(number) + ": expected " +
                      std::to_string(1 + 2 * table.series.size()) + " columns");
    }
    auto number_at = [&](std::size_t k) {
      if (f[k] == "nan") return std::nan("");
      const std::optional<double> v = parse_double(f[k]);
      if (!v) throw DataError(source + ":" + std::to_string(number) + ": bad number '" + f[k] + "'");
      return *v;
    };
    table.x.push_back(number_at(0));
    for (std::size_t s = 0; s < table.series.size(); ++s) {
      table.series[s].mean.push_back(number_at(1 + 2 * s));
      table.series[s].sd.push_back(number_at(2 + 2 * s));
    }
  }
  if (!have_header) throw DataError(source + ": no plot data");
  return table;
}

}  // namespace bballoc
