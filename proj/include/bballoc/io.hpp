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

// On-disk formats.
//
//   trajectories.csv   user_id,x,y,t_start,t_end,interests   (interests ';'-separated)
//   billboards.csv     billboard_id,slot_id,x,y,t_start,t_end,size
//   instance manifest  key = value lines naming both CSVs, thresholds, budgets
//   allocation         product_id:slot_id;slot_id...  then "---" and key = value metrics
//
// Every reader throws DataError with the file name and line number.

#ifndef BBALLOC_IO_HPP_
#define BBALLOC_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bballoc/model.hpp"

namespace bballoc {

inline constexpr const char* kTrajectoryHeader = "user_id,x,y,t_start,t_end,interests";
inline constexpr const char* kBillboardHeader = "billboard_id,slot_id,x,y,t_start,t_end,size";
inline constexpr const char* kMetricsSeparator = "---";

std::vector<TrajectoryRecord> read_trajectories(std::istream& in, const std::string& source);
void write_trajectories(std::ostream& out, const std::vector<TrajectoryRecord>& records);

std::vector<BillboardSlot> read_billboards(std::istream& in, const std::string& source);
void write_billboards(std::ostream& out, const StrongVector<SlotIndex, BillboardSlot>& slots);

struct Manifest {
  std::filesystem::path trajectories = "trajectories.csv";
  std::filesystem::path billboards = "billboards.csv";
  CoordinateMode coordinates = CoordinateMode::kPlanar;
  double theta = 0.05;
  double lambda = 100.0;
  int64_t delta = 3600;
  int64_t horizon_start = 0;
  int64_t horizon_end = 0;
  int64_t min_overlap = 1;
  std::optional<double> epsilon;
  std::vector<Product> budgets;  // declared product order
};

Manifest read_manifest(std::istream& in, const std::string& source);
void write_manifest(std::ostream& out, const Manifest& manifest);

struct LoadedInstance {
  Instance instance;
  std::optional<double> epsilon;
};

// Reads the manifest and the CSVs it names (relative to the manifest's
// directory) and validates the result.
LoadedInstance load_instance(const std::filesystem::path& manifest_path);

// Writes <dir>/<stem>.manifest, <dir>/trajectories.csv, <dir>/billboards.csv.
// Returns the manifest path. Throws Error when a file cannot be written.
std::filesystem::path save_instance(const std::filesystem::path& dir, const Instance& inst,
                                    std::optional<double> epsilon = std::nullopt,
                                    const std::string& stem = "instance");

using Metrics = std::vector<std::pair<std::string, std::string>>;

// Standard trailer: total influence, gap, balance flag, seed, one line per
// product influence.
Metrics allocation_metrics(const Instance& inst, const Allocation& alloc);

void write_allocation(std::ostream& out, const Instance& inst, const Assignments& assignments,
                      const Metrics& metrics);

struct AllocationFile {
  std::vector<IdAssignment> assignments;
  Metrics metrics;
};

AllocationFile read_allocation(std::istream& in, const std::string& source);

}  // namespace bballoc

#endif  // BBALLOC_IO_HPP_
