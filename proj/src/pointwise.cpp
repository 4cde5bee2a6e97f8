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

#include "elab/pointwise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "elab/error.hpp"
#include "elab/parallel.hpp"

namespace elab::pointwise {
namespace {

constexpr const char* kModule = "emergence";

// Rolling count of depth-D blocks; the dense table is used while m^D is small.
class BlockCounter {
 public:
  BlockCounter(int m, int depth) {
    std::uint64_t size = 1;
    for (int i = 0; i < depth; ++i) size *= static_cast<std::uint64_t>(m);
    if (size <= (std::uint64_t{1} << 24)) dense_.assign(size, 0);
  }

  void add(std::uint64_t code) {
    std::uint64_t& slot = dense_.empty() ? sparse_[code] : dense_[code];
    if (slot++ == 0) touched_.push_back(code);
  }

  FinSuppMeasure snapshot(std::size_t n, int m, double beta, int depth) {
    std::sort(touched_.begin(), touched_.end());
    const double inv = 1.0 / static_cast<double>(n);
    std::vector<FinSuppMeasure::Atom> atoms;
    atoms.reserve(touched_.size());
    for (std::uint64_t code : touched_) {
      const std::uint64_t c = dense_.empty() ? sparse_[code] : dense_[code];
      atoms.push_back({code, static_cast<double>(c) * inv});
    }
    return FinSuppMeasure(m, beta, depth, std::move(atoms));
  }

 private:
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
  std::vector<std::uint64_t> touched_;
};

class ExactCover {
 public:
  ExactCover(std::vector<std::uint32_t> cov, std::uint32_t full)
      : cov_(std::move(cov)), full_(full) {}

  bool feasible(std::uint32_t mask, int budget) {
    if (mask == full_) return true;
    if (budget == 0) return false;
    auto it = failed_.find(mask);
    if (it != failed_.end() && it->second >= budget) return false;
    const int p = std::countr_one(mask);
    for (std::size_t c = 0; c < cov_.size(); ++c) {
      if (!(cov_[c] >> p & 1u)) continue;
      if (feasible(mask | cov_[c], budget - 1)) return true;
    }
    int& worst = failed_[mask];
    worst = std::max(worst, budget);
    return false;
  }

 private:
  std::vector<std::uint32_t> cov_;
  std::uint32_t full_;
  std::unordered_map<std::uint32_t, int> failed_;
};

struct Greedy {
  int lower;
  int upper;
};

Greedy farthest_point(std::span<const double> dist, std::size_t n, double eps) {
  std::vector<double> nearest(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(n));
  int centers = 1;
  int upper = 0;
  int lower = 1;
  for (;;) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    const double radius = nearest[far];
    // The first `centers` + 1 traversal points are pairwise >= radius apart.
    if (radius > 2 * eps) lower = centers + 1;
    if (radius <= eps) {
      upper = centers;
      break;
    }
    ++centers;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[far * n + i]);
  }
  return {lower, upper};
}

// Maximal set of points pairwise more than 2 eps apart, scanned in `order`.
// Closed eps-balls each hold at most one of them.
int greedy_packing(std::span<const double> dist, std::size_t n, double eps,
                   std::span<const std::size_t> order) {
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool ok = true;
    for (std::size_t k : kept) {
      if (dist[i * n + k] <= 2 * eps) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(i);
  }
  return static_cast<int>(kept.size());
}

int packing_lower(std::span<const double> dist, std::size_t n, double eps) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  int best = greedy_packing(dist, n, eps, order);
  std::reverse(order.begin(), order.end());
  best = std::max(best, greedy_packing(dist, n, eps, order));
  // Fewest-neighbours first tends to give larger packings.
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) degree[i] += dist[i * n + k] <= 2 * eps ? 1 : 0;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });
  return std::max(best, greedy_packing(dist, n, eps, order));
}

}  // namespace

std::vector<std::size_t> geometric_times(std::size_t n_min, std::size_t n_max,
                                         std::size_t count) {
  if (n_min < 1 || n_max < n_min || count < 2) {
    throw Error(ErrorKind::kInput, kModule, "build_cloud",
                "need 1 <= n_min <= n_max and count >= 2");
  }
  std::vector<std::size_t> times;
  const double ratio = static_cast<double>(n_max) / static_cast<double>(n_min);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t t;
    if (i == 0) {
      t = n_min;
    } else if (i + 1 == count) {
      t = n_max;
    } else {
      const double f = static_cast<double>(i) / static_cast<double>(count - 1);
      t = static_cast<std::size_t>(std::llround(static_cast<double>(n_min) * std::pow(ratio, f)));
    }
    if (times.empty() || t > times.back()) times.push_back(t);
  }
  return times;
}

TrajectoryCloud build_cloud_at(std::span<const Symbol> symbols, std::vector<std::size_t> times,
                               int depth, const sofic::ShiftSpace& space) {
  const int m = space.alphabet_size();
  if (depth < 1 || depth > measures::max_code_depth(m)) {
    throw Error(ErrorKind::kInput, kModule, "build_cloud",
                "depth " + std::to_string(depth) + " out of range");
  }
  if (times.empty() || times.front() < 1 ||
      !std::is_sorted(times.begin(), times.end(), std::less_equal<>()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end()) {
    throw Error(ErrorKind::kInput, kModule, "build_cloud",
                "times must be positive and strictly increasing");
  }
  const std::size_t need = times.back() + static_cast<std::size_t>(depth) - 1;
  if (symbols.size() < need) {
    throw Error(ErrorKind::kDepth, kModule, "build_cloud",
                "need " + std::to_string(need) + " symbols, have " +
                    std::to_string(symbols.size()));
  }
  sofic::check_symbols(symbols.first(need), space);

  TrajectoryCloud cloud;
  cloud.depth = depth;
  cloud.times = std::move(times);
  BlockCounter counter(m, depth);
  const auto mm = static_cast<std::uint64_t>(m);
  std::uint64_t high = 1;
  for (int i = 1; i < depth; ++i) high *= mm;
  std::uint64_t code = measures::encode(symbols.first(depth - 1), m);
  std::size_t next = 0;
  for (std::size_t i = 0; i < cloud.times.back(); ++i) {
    code = (code % high) * mm + (symbols[i + depth - 1] - 1);
    counter.add(code);
    if (i + 1 == cloud.times[next]) {
      cloud.snapshots.push_back(counter.snapshot(i + 1, m, space.beta(), depth));
      ++next;
    }
  }
  return cloud;
}

TrajectoryCloud build_cloud(std::span<const Symbol> symbols, std::size_t n_min,
                            std::size_t n_max, std::size_t count, int depth,
                            const sofic::ShiftSpace& space) {
  return build_cloud_at(symbols, geometric_times(n_min, n_max, count), depth, space);
}

TrajectoryCloud build_cloud(const sofic::PointPrefix& x, std::size_t n_min, std::size_t n_max,
                            std::size_t count, int depth, const sofic::ShiftSpace& space) {
  const std::size_t need = n_max + static_cast<std::size_t>(std::max(depth, 1)) - 1;
  if (x.usable_depth() < need) {
    throw Error(ErrorKind::kDepth, kModule, "build_cloud",
                "point has usable depth " + std::to_string(x.usable_depth()) + ", need " +
                    std::to_string(need));
  }
  const Word w = x.materialize(need);
  return build_cloud(w, n_min, n_max, count, depth, space);
}

std::vector<double> distance_matrix(const TrajectoryCloud& cloud,
                                    std::span<const std::size_t> indices, unsigned threads,
                                    const measures::TransportOptions& options) {
  const std::size_t n = indices.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> dist(n * n, 0.0);
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double d = measures::wasserstein1(cloud.snapshots[indices[i]],
                                            cloud.snapshots[indices[j]], cloud.depth, options)
                         .value;
    dist[i * n + j] = d;
    dist[j * n + i] = d;
  });
  return dist;
}

int exact_cover_number(std::span<const double> dist, std::size_t n, double eps) {
  if (n > 24) {
    throw Error(ErrorKind::kSize, kModule, "covering_number_bounds",
                "exact cover limited to 24 points, got " + std::to_string(n));
  }
  if (n == 0) return 0;
  std::vector<std::uint32_t> cov(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[i * n + j] <= eps) cov[i] |= std::uint32_t{1} << j;
    }
  }
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  ExactCover solver(std::move(cov), full);
  for (int k = 1;; ++k) {
    if (solver.feasible(0, k)) return k;
  }
}

CoverBounds covering_number_bounds(std::span<const double> dist, std::size_t n, double eps,
                                   const CoverOptions& options) {
  if (dist.size() != n * n) {
    throw Error(ErrorKind::kInput, kModule, "covering_number_bounds",
                "distance matrix does not match the point count");
  }
  CoverBounds out;
  if (n == 0) return out;
  const Greedy g = farthest_point(dist, n, eps);
  out.greedy_lower = out.lower = std::max(g.lower, packing_lower(dist, n, eps));
  out.greedy_upper = out.upper = g.upper;
  if (n <= std::min<std::size_t>(options.exact_limit, 24)) {
    out.exact = exact_cover_number(dist, n, eps);
    out.lower = out.upper = *out.exact;
  }
  return out;
}

Fit emergence_exponent(std::span<const double> epsilons, std::span<const int> counts) {
  if (epsilons.size() != counts.size() || epsilons.size() < 3) {
    throw Error(ErrorKind::kInput, kModule, "emergence_exponent",
                "need at least 3 scales with one count each");
  }
  Fit fit;
  const auto n = static_cast<double>(counts.size());
  if (std::all_of(counts.begin(), counts.end(), [&](int c) { return c == counts[0]; })) {
    fit.degenerate = true;
    fit.intercept = std::log(static_cast<double>(counts[0]));
    return fit;
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    sx += -std::log(epsilons[i]);
    sy += std::log(static_cast<double>(counts[i]));
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double dx = -std::log(epsilons[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(static_cast<double>(counts[i])) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = std::log(static_cast<double>(counts[i])) -
                     (fit.intercept - fit.slope * std::log(epsilons[i]));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

EmergenceReport emergence_estimate(const TrajectoryCloud& cloud, std::span<const double> epsilons,
                                   double tail_fraction, unsigned threads,
                                   const CoverOptions& options) {
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
    throw Error(ErrorKind::kInput, kModule, "emergence_estimate",
                "tail_fraction must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
      throw Error(ErrorKind::kInput, kModule, "emergence_estimate",
                  "scales must be positive and strictly decreasing");
    }
  }
  const std::size_t count = cloud.snapshots.size();
  if (count == 0) {
    throw Error(ErrorKind::kInput, kModule, "emergence_estimate", "cloud has no snapshots");
  }
  const auto keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(count) - 1e-12)), 1,
      count);
  std::vector<std::size_t> idx(keep);
  for (std::size_t i = 0; i < keep; ++i) idx[i] = count - keep + i;
  const std::vector<double> dist = distance_matrix(cloud, idx, threads);

  EmergenceReport report;
  report.tail_fraction = tail_fraction;
  report.n_window_start = cloud.times[idx.front()];
  report.n_window_end = cloud.times.back();
  report.epsilons.assign(epsilons.begin(), epsilons.end());
  for (double eps : epsilons) {
    const CoverBounds b = covering_number_bounds(dist, keep, eps, options);
    report.lower.push_back(b.lower);
    report.upper.push_back(b.upper);
  }
  if (epsilons.size() >= 3) {
    report.upper_fit = emergence_exponent(epsilons, report.upper);
    report.lower_fit = emergence_exponent(epsilons, report.lower);
  }
  return report;
}

}  // namespace elab::pointwise
