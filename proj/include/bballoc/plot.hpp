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

#ifndef BBALLOC_PLOT_HPP_
#define BBALLOC_PLOT_HPP_

#include <iosfwd>

#include "bballoc/sweep.hpp"

namespace bballoc {

// Static line chart, one polyline per series with +-sd error bars.
void write_svg(std::ostream& out, const PlotTable& table);

}  // namespace bballoc

#endif  // BBALLOC_PLOT_HPP_
