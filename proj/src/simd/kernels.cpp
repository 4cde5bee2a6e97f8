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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "elab/error.hpp"
#include "elab/simd.hpp"

namespace elab::simd {
namespace {

void l1_distances_scalar(const double* query, const double* points,
                         std::size_t stride, std::size_t count,
                         std::size_t dim, double* out) {
  for (std::size_t p = 0; p < count; ++p) out[p] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double q = query[k];
    const double* row = points + k * stride;
    for (std::size_t p = 0; p < count; ++p) out[p] += std::fabs(q - row[p]);
  }
}

void relax_scalar(const double* cost, double offset, const double* pot,
                  double* dist, std::int32_t* pred, std::int32_t tag,
                  std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double cand = (cost[j] + offset) - pot[j];
    if (cand < dist[j]) {
      dist[j] = cand;
      pred[j] = tag;
    }
  }
}

std::size_t argmin_scalar(const double* values, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (values[j] < values[best]) best = j;
  }
  return best;
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ELAB_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::kScalar;
    if (choice == "avx2" && cpu_has_avx2()) return Backend::kAvx2;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& active() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

namespace detail {
const KernelTable kScalarKernels = {&l1_distances_scalar, &relax_scalar,
                                    &argmin_scalar};
}  // namespace detail

bool supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& kernels(Backend backend) {
  if (!supported(backend)) {
    throw Error(ErrorKind::kInput, "simd", "kernels",
                "backend " + std::string(to_string(backend)) +
                    " is not supported on this CPU");
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (backend == Backend::kAvx2) return detail::kAvx2Kernels;
#endif
  return detail::kScalarKernels;
}

const KernelTable& kernels() { return kernels(active().load()); }

Backend active_backend() { return active().load(); }

void set_backend(Backend backend) {
  if (!supported(backend)) {
    throw Error(ErrorKind::kInput, "simd", "set_backend",
                "backend " + std::string(to_string(backend)) +
                    " is not supported on this CPU");
  }
  active().store(backend);
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace elab::simd
