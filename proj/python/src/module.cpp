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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bballoc/datagen.hpp"
#include "bballoc/errors.hpp"
#include "bballoc/greedy.hpp"
#include "bballoc/influence.hpp"
#include "bballoc/io.hpp"
#include "bballoc/runner.hpp"

namespace py = pybind11;
using namespace bballoc;

namespace {

// An instance together with its influence matrix, built once.
struct Problem {
  Instance instance;
  InfluenceMatrix matrix;
  std::optional<double> epsilon;

  Problem(Instance inst, std::optional<double> eps)
      : instance(std::move(inst)), matrix(build_influence_matrix(instance)), epsilon(eps) {}
};

py::dict allocation_dict(const Instance& inst, const Allocation& alloc) {
  py::dict assignments;
  for (const IdAssignment& entry : to_id_assignments(inst, alloc.assignments)) {
    assignments[py::str(entry.product_id)] = entry.slot_ids;
  }
  py::dict influence;
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    influence[py::str(inst.products[i].id)] = alloc.per_product_influence[i];
  }
  py::dict out;
  out["assignments"] = assignments;
  out["influence"] = influence;
  out["total_influence"] = alloc.total_influence();
  out["fairness_gap"] = alloc.fairness_gap;
  out["balance_satisfied"] = alloc.balance_satisfied;
  out["seed"] = alloc.seed;
  return out;
}

std::vector<IdAssignment> ids_from_dict(const py::dict& d) {
  std::vector<IdAssignment> ids;
  for (const auto& [key, value] : d) {
    ids.push_back(IdAssignment{py::cast<std::string>(key), py::cast<std::vector<std::string>>(value)});
  }
  return ids;
}

}  // namespace

PYBIND11_MODULE(_bballoc, m) {
  m.doc() = "Balanced multi-product billboard slot allocation";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_RuntimeError);

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("num_slots", [](const Problem& p) { return p.instance.num_slots(); })
      .def_property_readonly("num_users", [](const Problem& p) { return p.instance.num_users(); })
      .def_property_readonly("num_products", [](const Problem& p) { return p.instance.num_products(); })
      .def_property_readonly("theta", [](const Problem& p) { return p.instance.theta; })
      .def_property_readonly("lambda_", [](const Problem& p) { return p.instance.lambda; })
      .def_property_readonly("epsilon", [](const Problem& p) { return p.epsilon; })
      .def_property_readonly("num_entries", [](const Problem& p) { return p.matrix.num_entries(); })
      .def_property_readonly("budgets",
                             [](const Problem& p) {
                               py::dict d;
                               for (const Product& q : p.instance.products) d[py::str(q.id)] = q.budget;
                               return d;
                             })
      .def("save", [](const Problem& p, const std::filesystem::path& dir) {
        return save_instance(dir, p.instance, p.epsilon);
      }, py::arg("directory"), "Writes the manifest and both CSVs; returns the manifest path.");

  m.def(
      "generate",
      [](int64_t billboards, int64_t users, int64_t products, double alpha, double beta,
         double theta, double lambda_, double epsilon, double extent, int64_t horizon,
         int64_t delta, uint64_t seed) {
        GenParams p;
        p.num_billboards = billboards;
        p.num_users = users;
        p.num_products = products;
        p.alpha = alpha;
        p.beta = beta;
        p.theta = theta;
        p.lambda = lambda_;
        p.epsilon = epsilon;
        p.city_extent = extent;
        p.horizon = horizon;
        p.delta = delta;
        p.seed = seed;
        GeneratedInstance gen = generate_instance(p);
        return Problem(std::move(gen.instance), gen.epsilon);
      },
      py::arg("billboards") = 84, py::arg("users") = 1000, py::arg("products") = 5,
      py::arg("alpha") = 1.0, py::arg("beta") = 0.05, py::arg("theta") = 0.05,
      py::arg("lambda_") = 100.0, py::arg("epsilon") = 0.1, py::arg("extent") = 2000.0,
      py::arg("horizon") = 86400, py::arg("delta") = 3600, py::arg("seed") = 0,
      "Generates a synthetic instance.");

  m.def(
      "load",
      [](const std::filesystem::path& manifest) {
        LoadedInstance loaded = load_instance(manifest);
        return Problem(std::move(loaded.instance), loaded.epsilon);
      },
      py::arg("manifest"), "Loads an instance manifest and the CSVs it names.");

  m.def(
      "solve",
      [](const Problem& p, const std::string& algo, uint64_t seed, std::optional<double> epsilon,
         std::optional<double> theta) {
        const auto a = parse_algorithm(algo);
        if (!a) throw DataError("unknown algorithm '" + algo + "'");
        SolveOptions options;
        options.seed = seed;
        options.epsilon = epsilon.value_or(p.epsilon.value_or(0.1));
        options.theta = theta;
        SolveOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = run_solver(p.instance, p.matrix, *a, options);
        }
        py::dict out = allocation_dict(p.instance, outcome.allocation);
        out["algorithm"] = algo;
        out["wall_ms"] = outcome.wall_ms;
        out["lp_objective"] = outcome.lp_objective;
        out["optimum"] = outcome.optimum;
        return out;
      },
      py::arg("problem"), py::arg("algo") = "greedy", py::arg("seed") = 0,
      py::arg("epsilon") = py::none(), py::arg("theta") = py::none(),
      "Runs one solver: lp-rr, greedy, random, topk or exact.");

  m.def(
      "check",
      [](const Problem& p, const py::dict& assignments) {
        const Assignments a = resolve_assignments(p.instance, ids_from_dict(assignments));
        const FeasibilityReport r = check_allocation(p.instance, p.matrix, a);
        py::dict out;
        out["budget_ok"] = r.budget_ok;
        out["disjoint_ok"] = r.disjoint_ok;
        out["balance_ok"] = r.balance_ok;
        out["fairness_gap"] = r.fairness_gap;
        out["influence"] = std::vector<double>(r.per_product_influence.begin(), r.per_product_influence.end());
        out["violations"] = r.violations;
        return out;
      },
      py::arg("problem"), py::arg("assignments"),
      "Checks a {product_id: [slot_id, ...]} allocation from scratch.");

  m.def("sample_size", &sample_size, py::arg("total_slots"), py::arg("epsilon"));
}
