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

#ifndef ELAB_SIMD_HPP_
#define ELAB_SIMD_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops used by the transport solver and the cost-matrix
// builder. Each kernel has a scalar reference and vector variants; the active
// variant is chosen once at startup from CPUID and can be overridden with
// ELAB_SIMD=scalar|avx2 or set_backend(). All variants produce bit-identical
// results (same operation order per output lane, no FMA contraction).
namespace elab::simd {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  // out[p] = sum_k |query[k] - points[k * stride + p]| for p < count.
  // Points are stored dimension-major so consecutive p are contiguous.
  void (*l1_distances)(const double* query, const double* points,
                       std::size_t stride, std::size_t count, std::size_t dim,
                       double* out);

  // Dijkstra row relaxation: for every j, cand = cost[j] + offset - pot[j];
  // if cand < dist[j] then dist[j] = cand and pred[j] = tag.
  void (*relax)(const double* cost, double offset, const double* pot,
                double* dist, std::int32_t* pred, std::int32_t tag,
                std::size_t n);

  // Index of the first minimum of values[0..n). Requires n > 0.
  std::size_t (*argmin)(const double* values, std::size_t n);
};

bool supported(Backend backend);
const KernelTable& kernels(Backend backend);
const KernelTable& kernels();

Backend active_backend();
void set_backend(Backend backend);
std::string_view to_string(Backend backend);

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Kernels;
#endif
}  // namespace detail

}  // namespace elab::simd

#endif  // ELAB_SIMD_HPP_
