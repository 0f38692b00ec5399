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

// bballoc: generate instances, solve them, check allocations, run sweeps.
//
//   bballoc gen   [--seed N] [--out DIR] ...
//   bballoc solve INSTANCE --algo lp-rr|greedy|random|topk|exact [--out FILE]
//   bballoc eval  INSTANCE ALLOCATION
//   bballoc sweep SPEC.json [--jobs N] [--out DIR] [--svg]
//   bballoc plot  DATA [--out FILE.svg]
//
// Output files go to --out, else $BBALLOC_OUT_DIR, else the working
// directory.
//
// Exit status: 0 ok, 1 usage, 2 data error, 3 infeasible allocation,
// 4 refused by the exhaustive-search size guard.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bballoc/datagen.hpp"
#include "bballoc/errors.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/io.hpp"
#include "bballoc/lp_relax.hpp"
#include "bballoc/plot.hpp"
#include "bballoc/runner.hpp"
#include "bballoc/sweep.hpp"
#include "bballoc/text.hpp"

namespace fs = std::filesystem;
using namespace bballoc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSizeGuard = 4;

fs::path default_out_dir() {
  if (const char* env = std::getenv("BBALLOC_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

struct GenArgs {
  GenParams params;
  std::string preset = "table";
  std::string theta_mode = "absolute";
  std::string out;
  std::string name = "instance";
};

int cmd_gen(GenArgs& args) {
  GenParams& p = args.params;
  const auto mode = parse_theta_mode(args.theta_mode);
  if (!mode) throw DataError("unknown theta mode '" + args.theta_mode + "'");
  p.theta_mode = *mode;
  const fs::path dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
  const GeneratedInstance gen = generate_instance(p);
  const fs::path manifest = save_instance(dir, gen.instance, gen.epsilon, args.name);
  int64_t total = 0;
  for (const Product& product : gen.instance.products) total += product.budget;
  std::cout << "wrote " << manifest.string() << "\n"
            << "slots " << gen.instance.num_slots() << "  users " << gen.instance.num_users()
            << "  products " << gen.instance.num_products() << "\n"
            << "total budget " << total << "  alpha " << format_number(gen.achieved_alpha)
            << "  theta " << format_number(gen.instance.theta) << "\n";
  if (gen.demands.clamped > 0) {
    std::cout << "note: " << gen.demands.clamped << " raw demand(s) below 1 were lifted to 1\n";
  }
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string algo = "greedy";
  uint64_t seed = 0;
  std::optional<double> epsilon;
  std::optional<double> theta;
  int64_t max_balance_iters = 0;
  std::string product_order = "declared";
  std::string topk_fill = "sequential";
  std::string out;
  std::string lp_dump;
  bool strict = false;
};

int cmd_solve(const SolveArgs& args) {
  const auto algo = parse_algorithm(args.algo);
  if (!algo) throw CLI::ValidationError("--algo", "unknown algorithm '" + args.algo + "'");
  const auto order = parse_product_order(args.product_order);
  if (!order) throw CLI::ValidationError("--product-order", "expected declared or shuffle");
  const auto fill = parse_topk_fill(args.topk_fill);
  if (!fill) throw CLI::ValidationError("--topk-fill", "expected sequential or round-robin");

  const LoadedInstance loaded = load_instance(args.instance);
  const Instance& inst = loaded.instance;
  const auto t0 = std::chrono::steady_clock::now();
  const InfluenceMatrix mat = build_influence_matrix(inst);
  const double matrix_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (!args.lp_dump.empty()) {
    const fs::path path = args.lp_dump;
    ensure_parent(path);
    std::ofstream lp_out(path);
    if (!lp_out) throw Error("cannot write " + path.string());
    write_lp(lp_out, build_lp(inst, mat, args.theta.value_or(inst.theta)), inst);
  }

  SolveOptions options;
  options.seed = args.seed;
  options.epsilon = args.epsilon.value_or(loaded.epsilon.value_or(0.1));
  options.theta = args.theta;
  options.max_balance_iters = args.max_balance_iters;
  options.product_order = *order;
  options.topk_fill = *fill;
  const SolveOutcome outcome = run_solver(inst, mat, *algo, options);
  const Allocation& alloc = outcome.allocation;

  Metrics metrics;
  metrics.emplace_back("algorithm", std::string(to_string(*algo)));
  for (auto& kv : allocation_metrics(inst, alloc)) metrics.push_back(std::move(kv));
  metrics.emplace_back("wall_time_ms", format_number(outcome.wall_ms));
  metrics.emplace_back("matrix_build_ms", format_number(matrix_ms));
  metrics.emplace_back("balance_iterations", std::to_string(outcome.balance_iterations));
  if (outcome.lp_objective) metrics.emplace_back("lp_objective", format_number(*outcome.lp_objective));
  if (outcome.optimum) metrics.emplace_back("optimum", format_number(*outcome.optimum));

  const fs::path out_path = args.out.empty()
                                ? default_out_dir() / (std::string(to_string(*algo)) + ".alloc")
                                : fs::path(args.out);
  ensure_parent(out_path);
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path.string());
  write_allocation(out, inst, alloc.assignments, metrics);

  std::cout << to_string(*algo) << ": influence " << format_number(alloc.total_influence()) << "  gap "
            << format_number(alloc.fairness_gap) << "  balanced "
            << (alloc.balance_satisfied ? "yes" : "no") << "  time_ms " << format_number(outcome.wall_ms);
  if (outcome.optimum) std::cout << "  optimum " << format_number(*outcome.optimum);
  if (outcome.lp_objective) std::cout << "  lp_bound " << format_number(*outcome.lp_objective);
  std::cout << "\nwrote " << out_path.string() << "\n";
  if (args.strict && !alloc.balance_satisfied) return kExitInfeasible;
  return kExitOk;
}

int cmd_eval(const std::string& instance_path, const std::string& allocation_path,
             std::optional<double> theta) {
  LoadedInstance loaded = load_instance(instance_path);
  Instance& inst = loaded.instance;
  if (theta) inst.theta = *theta;
  const InfluenceMatrix mat = build_influence_matrix(inst);
  std::ifstream in(allocation_path);
  if (!in) throw DataError("cannot open " + allocation_path);
  const AllocationFile file = read_allocation(in, allocation_path);
  const Assignments assignments = resolve_assignments(inst, file.assignments);
  const FeasibilityReport report = check_allocation(inst, mat, assignments);

  double total = 0.0;
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    std::cout << "influence " << inst.products[i].id << " " << format_number(report.per_product_influence[i])
              << "  slots " << assignments[i].size() << "/" << inst.products[i].budget << "\n";
    total += report.per_product_influence[i];
  }
  std::cout << "total_influence " << format_number(total) << "\n"
            << "fairness_gap " << format_number(report.fairness_gap) << "\n"
            << "budget " << (report.budget_ok ? "ok" : "violated") << "\n"
            << "disjoint " << (report.disjoint_ok ? "ok" : "violated") << "\n"
            << "balance " << (report.balance_ok ? "ok" : "violated") << " (theta "
            << format_number(inst.theta) << ")\n";
  for (const std::string& v : report.violations) std::cout << "violation: " << v << "\n";
  return report.hard_constraints_ok() ? kExitOk : kExitInfeasible;
}

struct SweepArgs {
  std::string spec;
  int jobs = 1;
  std::string out;
  bool svg = false;
  std::string product_order;
  std::string topk_fill;
  bool quiet = false;
};

int cmd_sweep(const SweepArgs& args) {
  std::ifstream in(args.spec);
  if (!in) throw DataError("cannot open " + args.spec);
  std::stringstream text;
  text << in.rdbuf();
  SweepSpec spec = parse_sweep_spec(text.str());
  if (!args.product_order.empty()) {
    const auto order = parse_product_order(args.product_order);
    if (!order) throw CLI::ValidationError("--product-order", "expected declared or shuffle");
    spec.solve.product_order = *order;
  }
  if (!args.topk_fill.empty()) {
    const auto fill = parse_topk_fill(args.topk_fill);
    if (!fill) throw CLI::ValidationError("--topk-fill", "expected sequential or round-robin");
    spec.solve.topk_fill = *fill;
  }
  const fs::path dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
  fs::create_directories(dir);

  const auto progress = [&](std::size_t done, std::size_t total) {
    if (!args.quiet) std::cerr << "\r" << done << "/" << total << " instances" << std::flush;
  };
  const std::vector<ResultRow> rows = run_sweep(spec, args.jobs, progress);
  if (!args.quiet) std::cerr << "\n";

  const fs::path results_path = dir / "results.csv";
  std::ofstream results(results_path);
  if (!results) throw Error("cannot write " + results_path.string());
  write_results_csv(results, rows);
  std::cout << "wrote " << results_path.string() << " (" << rows.size() << " rows)\n";

  for (std::string_view metric : kPlotMetrics) {
    const PlotTable table = summarize(rows, metric);
    const fs::path data_path = dir / ("plot_" + std::string(metric) + ".dat");
    std::ofstream data(data_path);
    if (!data) throw Error("cannot write " + data_path.string());
    write_plot_data(data, table);
    std::cout << "wrote " << data_path.string() << "\n";
    if (args.svg) {
      const fs::path svg_path = dir / ("plot_" + std::string(metric) + ".svg");
      std::ofstream svg(svg_path);
      if (!svg) throw Error("cannot write " + svg_path.string());
      write_svg(svg, table);
      std::cout << "wrote " << svg_path.string() << "\n";
    }
  }
  std::size_t failures = 0;
  for (const ResultRow& r : rows) failures += r.error.empty() ? 0 : 1;
  if (failures > 0) std::cout << failures << " run(s) failed; see the error column\n";
  return kExitOk;
}

int cmd_plot(const std::string& data_path, const std::string& out_arg) {
  std::ifstream in(data_path);
  if (!in) throw DataError("cannot open " + data_path);
  const PlotTable table = read_plot_data(in, data_path);
  fs::path out_path = out_arg;
  if (out_path.empty()) out_path = default_out_dir() / fs::path(data_path).filename().replace_extension(".svg");
  ensure_parent(out_path);
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path.string());
  write_svg(out, table);
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced multi-product billboard slot allocation"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic instance");
  gen_cmd->add_option("--preset", gen.preset, "table (alpha 1.0) or text (alpha 0.8)")
      ->check(CLI::IsMember({"table", "text"}));
  gen_cmd->add_option("--billboards", gen.params.num_billboards, "Number of billboards");
  gen_cmd->add_option("--horizon", gen.params.horizon, "Horizon length in seconds");
  gen_cmd->add_option("--delta", gen.params.delta, "Slot duration in seconds");
  gen_cmd->add_option("--users", gen.params.num_users, "Number of users");
  gen_cmd->add_option("--products", gen.params.num_products, "Number of products");
  gen_cmd->add_option("--alpha", gen.params.alpha, "Total demand over total supply");
  gen_cmd->add_option("--beta", gen.params.beta, "Mean product demand over total supply");
  gen_cmd->add_option("--omega-lo", gen.params.omega_lo, "Lower end of the demand jitter");
  gen_cmd->add_option("--omega-hi", gen.params.omega_hi, "Upper end of the demand jitter");
  gen_cmd->add_option("--theta", gen.params.theta, "Influence gap threshold");
  gen_cmd->add_option("--theta-mode", gen.theta_mode, "absolute or relative");
  gen_cmd->add_option("--lambda", gen.params.lambda, "Influence radius in meters");
  gen_cmd->add_option("--epsilon", gen.params.epsilon, "Greedy sampling error parameter");
  gen_cmd->add_option("--extent", gen.params.city_extent, "City side length in meters");
  gen_cmd->add_option("--seed", gen.params.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_option("--name", gen.name, "Manifest file stem");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("instance", solve.instance, "Instance manifest")->required();
  solve_cmd->add_option("--algo", solve.algo, "lp-rr, greedy, random, topk or exact");
  solve_cmd->add_option("--seed", solve.seed, "Solver seed");
  solve_cmd->add_option("--epsilon", solve.epsilon, "Greedy sampling error parameter");
  solve_cmd->add_option("--theta", solve.theta, "Override the instance threshold");
  solve_cmd->add_option("--max-balance-iters", solve.max_balance_iters, "Balance move cap (0: 2|BS|)");
  solve_cmd->add_option("--product-order", solve.product_order, "declared or shuffle");
  solve_cmd->add_option("--topk-fill", solve.topk_fill, "sequential or round-robin");
  solve_cmd->add_option("--out", solve.out, "Allocation file");
  solve_cmd->add_option("--lp-dump", solve.lp_dump, "Write the relaxation in LP format");
  solve_cmd->add_flag("--strict", solve.strict, "Exit 3 when balance is not reached");

  std::string eval_instance;
  std::string eval_allocation;
  std::optional<double> eval_theta;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Check an allocation against an instance");
  eval_cmd->add_option("instance", eval_instance, "Instance manifest")->required();
  eval_cmd->add_option("allocation", eval_allocation, "Allocation file")->required();
  eval_cmd->add_option("--theta", eval_theta, "Override the instance threshold");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("spec", sweep.spec, "Sweep spec (JSON)")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out, "Output directory");
  sweep_cmd->add_flag("--svg", sweep.svg, "Also render SVG charts");
  sweep_cmd->add_option("--product-order", sweep.product_order, "declared or shuffle");
  sweep_cmd->add_option("--topk-fill", sweep.topk_fill, "sequential or round-robin");
  sweep_cmd->add_flag("--quiet", sweep.quiet, "No progress output");

  std::string plot_data;
  std::string plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render plot data as SVG");
  plot_cmd->add_option("data", plot_data, "Plot data file")->required();
  plot_cmd->add_option("--out", plot_out, "SVG file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      if (gen.preset == "text") {
        GenParams preset = GenParams::text_preset();
        if (gen_cmd->count("--alpha") == 0) gen.params.alpha = preset.alpha;
      }
      return cmd_gen(gen);
    }
    if (*solve_cmd) return cmd_solve(solve);
    if (*eval_cmd) return cmd_eval(eval_instance, eval_allocation, eval_theta);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*plot_cmd) return cmd_plot(plot_data, plot_out);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SizeGuardError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitSizeGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
