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

#include "bballoc/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "bballoc/errors.hpp"
#include "bballoc/text.hpp"

namespace bballoc {
namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

double need_double(std::string_view field, const std::string& source, std::size_t line,
                   const char* name) {
  const std::optional<double> v = parse_double(field);
  if (!v || std::isnan(*v)) fail(source, line, std::string("bad ") + name + " '" + std::string(field) + "'");
  return *v;
}

int64_t need_int(std::string_view field, const std::string& source, std::size_t line,
                 const char* name) {
  const std::optional<int64_t> v = parse_int(field);
  if (!v) fail(source, line, std::string("bad ") + name + " '" + std::string(field) + "'");
  return *v;
}

// Identifiers end up inside CSV cells and ';' lists.
void check_id(const std::string& id, const char* kind) {
  if (id.empty() || id.find_first_of(",;:\"\r\n") != std::string::npos || trim(id) != id) {
    throw DataError(std::string(kind) + " id '" + id + "' cannot be written");
  }
}

// Reads the next non-empty line; returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& number) {
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

void expect_header(std::istream& in, const std::string& source, const char* header) {
  std::string line;
  std::size_t number = 0;
  if (!next_line(in, line, number)) fail(source, 1, "empty file");
  if (line != header) fail(source, number, "expected header '" + std::string(header) + "'");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<TrajectoryRecord> read_trajectories(std::istream& in, const std::string& source) {
  expect_header(in, source, kTrajectoryHeader);
  std::vector<TrajectoryRecord> records;
  std::string line;
  std::size_t number = 1;
  while (next_line(in, line, number)) {
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 6) fail(source, number, "expected 6 fields, got " + std::to_string(f.size()));
    TrajectoryRecord r;
    r.user_id = std::string(trim(f[0]));
    if (r.user_id.empty()) fail(source, number, "empty user_id");
    r.loc = {need_double(f[1], source, number, "x"), need_double(f[2], source, number, "y")};
    r.t_start = need_int(f[3], source, number, "t_start");
    r.t_end = need_int(f[4], source, number, "t_end");
    for (const std::string& item : split(f[5], ';')) {
      const std::string_view id = trim(item);
      if (!id.empty()) r.interests.emplace_back(id);
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_trajectories(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryRecord& r : records) {
    check_id(r.user_id, "user");
    out << r.user_id << ',' << format_number(r.loc.x) << ',' << format_number(r.loc.y) << ','
        << r.t_start << ',' << r.t_end << ',';
    for (std::size_t k = 0; k < r.interests.size(); ++k) {
      check_id(r.interests[k], "product");
      out << (k ? ";" : "") << r.interests[k];
    }
    out << '\n';
  }
}

std::vector<BillboardSlot> read_billboards(std::istream& in, const std::string& source) {
  expect_header(in, source, kBillboardHeader);
  std::vector<BillboardSlot> slots;
  std::string line;
  std::size_t number = 1;
  while (next_line(in, line, number)) {
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 7) fail(source, number, "expected 7 fields, got " + std::to_string(f.size()));
    BillboardSlot s;
    s.billboard_id = std::string(trim(f[0]));
    s.slot_id = std::string(trim(f[1]));
    if (s.slot_id.empty()) fail(source, number, "empty slot_id");
    s.loc = {need_double(f[2], source, number, "x"), need_double(f[3], source, number, "y")};
    s.t_start = need_int(f[4], source, number, "t_start");
    s.t_end = need_int(f[5], source, number, "t_end");
    s.size = need_double(f[6], source, number, "size");
    slots.push_back(std::move(s));
  }
  return slots;
}

void write_billboards(std::ostream& out, const StrongVector<SlotIndex, BillboardSlot>& slots) {
  out << kBillboardHeader << '\n';
  for (const BillboardSlot& s : slots) {
    check_id(s.billboard_id, "billboard");
    check_id(s.slot_id, "slot");
    out << s.billboard_id << ',' << s.slot_id << ',' << format_number(s.loc.x) << ','
        << format_number(s.loc.y) << ',' << s.t_start << ',' << s.t_end << ','
        << format_number(s.size) << '\n';
  }
}

Manifest read_manifest(std::istream& in, const std::string& source) {
  Manifest m;
  bool has_budgets = false;
  bool has_horizon_end = false;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (next_line(in, line, number)) {
    const std::string_view text = trim(line);
    if (text.front() == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) fail(source, number, "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (!seen.insert(key).second) fail(source, number, "duplicate key '" + key + "'");
    if (key == "trajectories") {
      m.trajectories = std::string(value);
    } else if (key == "billboards") {
      m.billboards = std::string(value);
    } else if (key == "coordinates") {
      const auto mode = parse_coordinate_mode(value);
      if (!mode) fail(source, number, "unknown coordinate mode '" + std::string(value) + "'");
      m.coordinates = *mode;
    } else if (key == "theta") {
      m.theta = need_double(value, source, number, "theta");
    } else if (key == "lambda") {
      m.lambda = need_double(value, source, number, "lambda");
    } else if (key == "delta") {
      m.delta = need_int(value, source, number, "delta");
    } else if (key == "horizon_start") {
      m.horizon_start = need_int(value, source, number, "horizon_start");
    } else if (key == "horizon_end") {
      m.horizon_end = need_int(value, source, number, "horizon_end");
      has_horizon_end = true;
    } else if (key == "min_overlap") {
      m.min_overlap = need_int(value, source, number, "min_overlap");
    } else if (key == "epsilon") {
      m.epsilon = need_double(value, source, number, "epsilon");
    } else if (key == "budgets") {
      has_budgets = true;
      for (const std::string& item : split(value, ';')) {
        if (trim(item).empty()) continue;
        const std::size_t colon = item.rfind(':');
        if (colon == std::string::npos) fail(source, number, "budget entry '" + item + "' lacks ':'");
        Product p;
        p.id = std::string(trim(std::string_view(item).substr(0, colon)));
        p.budget = need_int(std::string_view(item).substr(colon + 1), source, number, "budget");
        m.budgets.push_back(std::move(p));
      }
    } else {
      fail(source, number, "unknown key '" + key + "'");
    }
  }
  if (!has_budgets) fail(source, number, "missing budgets");
  if (!has_horizon_end) fail(source, number, "missing horizon_end");
  return m;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "# bballoc instance\n";
  out << "trajectories = " << m.trajectories.generic_string() << '\n';
  out << "billboards = " << m.billboards.generic_string() << '\n';
  out << "coordinates = " << to_string(m.coordinates) << '\n';
  out << "theta = " << format_number(m.theta) << '\n';
  out << "lambda = " << format_number(m.lambda) << '\n';
  out << "delta = " << m.delta << '\n';
  out << "horizon_start = " << m.horizon_start << '\n';
  out << "horizon_end = " << m.horizon_end << '\n';
  out << "min_overlap = " << m.min_overlap << '\n';
  if (m.epsilon) out << "epsilon = " << format_number(*m.epsilon) << '\n';
  out << "budgets = ";
  for (std::size_t k = 0; k < m.budgets.size(); ++k) {
    check_id(m.budgets[k].id, "product");
    out << (k ? ";" : "") << m.budgets[k].id << ':' << m.budgets[k].budget;
  }
  out << '\n';
}

LoadedInstance load_instance(const std::filesystem::path& manifest_path) {
  std::ifstream mf = open_in(manifest_path);
  const Manifest m = read_manifest(mf, manifest_path.string());
  const std::filesystem::path base = manifest_path.parent_path();
  const std::filesystem::path traj_path = base / m.trajectories;
  const std::filesystem::path board_path = base / m.billboards;

  LoadedInstance out;
  Instance& inst = out.instance;
  inst.coordinates = m.coordinates;
  inst.theta = m.theta;
  inst.lambda = m.lambda;
  inst.delta = m.delta;
  inst.horizon_start = m.horizon_start;
  inst.horizon_end = m.horizon_end;
  inst.min_overlap = m.min_overlap;
  for (const Product& p : m.budgets) inst.products.push_back(p);
  out.epsilon = m.epsilon;

  std::ifstream tf = open_in(traj_path);
  inst.users = group_records(read_trajectories(tf, traj_path.string()));
  std::ifstream bf = open_in(board_path);
  for (BillboardSlot& s : read_billboards(bf, board_path.string())) inst.slots.push_back(std::move(s));

  const std::vector<std::string> problems = validate_instance(inst);
  if (!problems.empty()) {
    std::string message = "invalid instance " + manifest_path.string() + ":";
    for (const std::string& p : problems) message += "\n  " + p;
    throw DataError(message);
  }
  return out;
}

std::filesystem::path save_instance(const std::filesystem::path& dir, const Instance& inst,
                                    std::optional<double> epsilon, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  Manifest m;
  m.coordinates = inst.coordinates;
  m.theta = inst.theta;
  m.lambda = inst.lambda;
  m.delta = inst.delta;
  m.horizon_start = inst.horizon_start;
  m.horizon_end = inst.horizon_end;
  m.min_overlap = inst.min_overlap;
  m.epsilon = epsilon;
  m.budgets.assign(inst.products.begin(), inst.products.end());

  {
    std::ofstream out = open_out(dir / m.trajectories);
    write_trajectories(out, flatten_users(inst.users));
    if (!out) throw Error("write failed: " + (dir / m.trajectories).string());
  }
  {
    std::ofstream out = open_out(dir / m.billboards);
    write_billboards(out, inst.slots);
    if (!out) throw Error("write failed: " + (dir / m.billboards).string());
  }
  const std::filesystem::path manifest_path = dir / (stem + ".manifest");
  std::ofstream out = open_out(manifest_path);
  write_manifest(out, m);
  if (!out) throw Error("write failed: " + manifest_path.string());
  return manifest_path;
}

Metrics allocation_metrics(const Instance& inst, const Allocation& alloc) {
  Metrics m;
  m.emplace_back("total_influence", format_number(alloc.total_influence()));
  m.emplace_back("fairness_gap", format_number(alloc.fairness_gap));
  m.emplace_back("balance_satisfied", alloc.balance_satisfied ? "true" : "false");
  m.emplace_back("seed", std::to_string(alloc.seed));
  for (ProductIndex i : index_range<ProductIndex>(inst.num_products())) {
    const double v = i.pos() < alloc.per_product_influence.size() ? alloc.per_product_influence[i] : 0.0;
    m.emplace_back("influence." + inst.products[i].id, format_number(v));
  }
  return m;
}

void write_allocation(std::ostream& out, const Instance& inst, const Assignments& assignments,
                      const Metrics& metrics) {
  for (const IdAssignment& entry : to_id_assignments(inst, assignments)) {
    out << entry.product_id << ':';
    for (std::size_t k = 0; k < entry.slot_ids.size(); ++k) out << (k ? ";" : "") << entry.slot_ids[k];
    out << '\n';
  }
  out << kMetricsSeparator << '\n';
  for (const auto& [key, value] : metrics) out << key << " = " << value << '\n';
}

AllocationFile read_allocation(std::istream& in, const std::string& source) {
  AllocationFile file;
  std::set<std::string> products;
  bool in_metrics = false;
  std::string line;
  std::size_t number = 0;
  while (next_line(in, line, number)) {
    const std::string_view text = trim(line);
    if (text == kMetricsSeparator) {
      in_metrics = true;
      continue;
    }
    if (in_metrics) {
      const std::size_t eq = text.find('=');
      if (eq == std::string_view::npos) fail(source, number, "expected key = value");
      file.metrics.emplace_back(std::string(trim(text.substr(0, eq))),
                                std::string(trim(text.substr(eq + 1))));
      continue;
    }
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) fail(source, number, "expected product_id:slot_id;...");
    IdAssignment entry;
    entry.product_id = std::string(trim(text.substr(0, colon)));
    if (!products.insert(entry.product_id).second) {
      fail(source, number, "product " + entry.product_id + " listed twice");
    }
    for (const std::string& item : split(text.substr(colon + 1), ';')) {
      const std::string_view id = trim(item);
      if (!id.empty()) entry.slot_ids.emplace_back(id);
    }
    file.assignments.push_back(std::move(entry));
  }
  return file;
}

}  // namespace bballoc
