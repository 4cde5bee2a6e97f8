// Copyright 2026 The emergence-lab Authors
//
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

#ifndef ELAB_TRANSPORT_HPP_
#define ELAB_TRANSPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace elab::transport {

struct Flow {
  std::int32_t row;
  std::int32_t col;
  double amount;
};

struct TransportPlan {
  double cost = 0.0;
  std::vector<Flow> flows;
  // Dual certificate: col_potential[j] - row_potential[i] <= cost(i, j) on
  // every arc, with equality wherever flow is positive.
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  int augmentations = 0;
};

// Exact balanced transportation problem by successive shortest paths with
// Johnson potentials. `cost` is row-major supply.size() x demand.size() and
// must be nonnegative. Supplies and demands must have equal totals up to
// rounding; leftover mass below 1e-14 of the total is dropped.
TransportPlan solve(std::span<const double> supply, std::span<const double> demand,
                    std::span<const double> cost);

}  // namespace elab::transport

#endif  // ELAB_TRANSPORT_HPP_
