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

#ifndef ELAB_POINTWISE_HPP_
#define ELAB_POINTWISE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "elab/measures.hpp"

namespace elab::pointwise {

using measures::FinSuppMeasure;

struct TrajectoryCloud {
  std::vector<std::size_t> times;          // strictly increasing
  std::vector<FinSuppMeasure> snapshots;   // empirical measure at each time
  int depth = 0;
};

// `count` geometrically spaced times in [n_min, n_max]; rounding collisions
// are dropped so the result may be shorter than `count`.
std::vector<std::size_t> geometric_times(std::size_t n_min, std::size_t n_max, std::size_t count);

TrajectoryCloud build_cloud(std::span<const Symbol> symbols, std::size_t n_min,
                            std::size_t n_max, std::size_t count, int depth,
                            const sofic::ShiftSpace& space);
TrajectoryCloud build_cloud(const sofic::PointPrefix& x, std::size_t n_min, std::size_t n_max,
                            std::size_t count, int depth, const sofic::ShiftSpace& space);
// Snapshots at explicitly given times.
TrajectoryCloud build_cloud_at(std::span<const Symbol> symbols, std::vector<std::size_t> times,
                               int depth, const sofic::ShiftSpace& space);

// Symmetric matrix (row-major, indices.size() squared) of truncated W1
// distances between the chosen snapshots.
std::vector<double> distance_matrix(const TrajectoryCloud& cloud,
                                    std::span<const std::size_t> indices, unsigned threads = 1,
                                    const measures::TransportOptions& options = {});

struct CoverBounds {
  int lower = 0;
  int upper = 0;
  // Greedy results: 2 eps-packing lower bound, farthest-point cover upper
  // bound. lower/upper equal these unless the exact solver ran.
  int greedy_lower = 0;
  int greedy_upper = 0;
  std::optional<int> exact;
};

struct CoverOptions {
  std::size_t exact_limit = 24;
};

// Covering numbers of n points with pairwise distances `dist` (row-major
// n x n). A cover is a set of data points such that every point is within eps
// of one of them. greedy_lower comes from a packing: points pairwise farther
// apart than 2 eps need distinct balls.
CoverBounds covering_number_bounds(std::span<const double> dist, std::size_t n, double eps,
                                   const CoverOptions& options = {});

// Minimum cover by exhaustive branching; n must not exceed 24.
int exact_cover_number(std::span<const double> dist, std::size_t n, double eps);

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square
  bool degenerate = false;
};

// Least squares of log(count) against -log(eps). All counts equal gives
// slope 0 with the degenerate flag set.
Fit emergence_exponent(std::span<const double> epsilons, std::span<const int> counts);

struct EmergenceReport {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<int> lower;
  std::vector<int> upper;
  std::size_t n_window_start = 0;
  std::size_t n_window_end = 0;
  double tail_fraction = 0.5;
  Fit upper_fit;
  Fit lower_fit;
};

// Covering bounds of the last ceil(tail_fraction * count) snapshots at each
// scale.
EmergenceReport emergence_estimate(const TrajectoryCloud& cloud, std::span<const double> epsilons,
                                   double tail_fraction, unsigned threads = 1,
                                   const CoverOptions& options = {});

}  // namespace elab::pointwise

#endif  // ELAB_POINTWISE_HPP_
