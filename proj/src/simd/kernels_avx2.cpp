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

// Compiled with -mavx2; only reached after a CPUID check.
#include <immintrin.h>

#include <cmath>

#include "elab/simd.hpp"

namespace elab::simd {
namespace {

void l1_distances_avx2(const double* query, const double* points,
                       std::size_t stride, std::size_t count, std::size_t dim,
                       double* out) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d q = _mm256_set1_pd(query[k]);
      const __m256d x = _mm256_loadu_pd(points + k * stride + p);
      acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, _mm256_sub_pd(q, x)));
    }
    _mm256_storeu_pd(out + p, acc);
  }
  for (; p < count; ++p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      acc += std::fabs(query[k] - points[k * stride + p]);
    }
    out[p] = acc;
  }
}

void relax_avx2(const double* cost, double offset, const double* pot,
                double* dist, std::int32_t* pred, std::int32_t tag,
                std::size_t n) {
  const __m256d off = _mm256_set1_pd(offset);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d cand = _mm256_sub_pd(
        _mm256_add_pd(_mm256_loadu_pd(cost + j), off), _mm256_loadu_pd(pot + j));
    const __m256d cur = _mm256_loadu_pd(dist + j);
    const __m256d better = _mm256_cmp_pd(cand, cur, _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(better);
    if (mask == 0) continue;
    _mm256_storeu_pd(dist + j, _mm256_blendv_pd(cur, cand, better));
    for (int lane = 0; lane < 4; ++lane) {
      if (mask & (1 << lane)) pred[j + lane] = tag;
    }
  }
  for (; j < n; ++j) {
    const double cand = (cost[j] + offset) - pot[j];
    if (cand < dist[j]) {
      dist[j] = cand;
      pred[j] = tag;
    }
  }
}

std::size_t argmin_avx2(const double* values, std::size_t n) {
  if (n < 8) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (values[j] < values[best]) best = j;
    }
    return best;
  }
  __m256d lo = _mm256_loadu_pd(values);
  std::size_t j = 4;
  for (; j + 4 <= n; j += 4) lo = _mm256_min_pd(lo, _mm256_loadu_pd(values + j));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, lo);
  double best = lanes[0];
  for (int lane = 1; lane < 4; ++lane) best = lanes[lane] < best ? lanes[lane] : best;
  for (; j < n; ++j) best = values[j] < best ? values[j] : best;
  // Second pass returns the first position holding the minimum.
  const __m256d target = _mm256_set1_pd(best);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mask = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(values + i), target, _CMP_EQ_OQ));
    if (mask != 0) return i + static_cast<std::size_t>(__builtin_ctz(mask));
  }
  for (; i < n; ++i) {
    if (values[i] == best) return i;
  }
  return 0;
}

}  // namespace

namespace detail {
const KernelTable kAvx2Kernels = {&l1_distances_avx2, &relax_avx2,
                                  &argmin_avx2};
}  // namespace detail

}  // namespace elab::simd
