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


#ifndef ELAB_CARATH_HPP_
#define ELAB_CARATH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "elab/measures.hpp"
#include "elab/potential.hpp"

namespace elab::carath {

using sofic::ShiftSpace;

enum class StructureKind { kEntropy, kHausdorff, kPressure, kAppendix };

std::string_view to_string(StructureKind kind);

// sup over x in C(u) of S_{|u|} phi(x), exact for window-k potentials.
double sup_birkhoff_sum(const ShiftSpace& space, const LocalPotential& phi,
                        std::span<const Symbol> u);

// A Caratheodory structure (xi, eta, psi) on cylinders. psi(C) = 1/l(C) for
// every kind. Weights are handled in log space.
class CStructure {
 public:
  static CStructure entropy(ShiftSpace space);
  static CStructure hausdorff(ShiftSpace space);
  static CStructure pressure(ShiftSpace space, LocalPotential phi);
  // u must be strictly positive on admissible windows.
  static CStructure appendix(ShiftSpace space, LocalPotential u);

  StructureKind kind() const { return kind_; }
  const ShiftSpace& space() const { return space_; }
  const std::optional<LocalPotential>& potential() const { return potential_; }

  double log_xi(std::span<const Symbol> u) const;
  double log_eta(std::span<const Symbol> u) const;
  double psi(std::span<const Symbol> u) const;
  // log q(C(u), t) = log xi + t log eta.
  double log_q(std::span<const Symbol> u, double t) const;

 private:
  CStructure(StructureKind kind, ShiftSpace space, std::optional<LocalPotential> potential);

  StructureKind kind_;
  ShiftSpace space_;
  std::optional<LocalPotential> potential_;
};

double q_weight(const CStructure& s, std::span<const Symbol> u, double t);

struct DpOptions {
  unsigned threads = 1;  // depth-1 subtrees run concurrently
};

// Infimum of sum q(C_i, t) over covers of the target by cylinders of length
// <= depth_cap. The target is a union of cylinders; an empty word stands for
// the whole space.
double outer_measure_M(const CStructure& s, std::span<const Word> target, double t,
                       int depth_cap, const DpOptions& options = {});
// Same, with cylinder lengths restricted to multiples of m_blk.
double outer_measure_N(const CStructure& s, std::span<const Word> target, double t, int m_blk,
                       int depth_cap, const DpOptions& options = {});

// (1/n) log sum over admissible |u| = n of exp(sup S_n phi on C(u)).
double pressure_partition(const ShiftSpace& space, const LocalPotential& phi, int n);
double pressure_partition(const CStructure& s, int n);

struct PressureOptions {
  int max_window = 8;
  std::size_t max_states = 4096;
};

// Log Perron root of the (k-1)-block transfer matrix.
double pressure_exact(const ShiftSpace& space, const LocalPotential& phi,
                      const PressureOptions& options = {});

// Root s of P(-s u) = 0, to 1e-9 or better.
double bowen_dimension(const ShiftSpace& space, const LocalPotential& u,
                       const PressureOptions& options = {});

// dim_C of the whole space for the built-in kinds.
double space_dimension(const CStructure& s);

double integrate(const LocalPotential& phi, const measures::MarkovMeasure& mu);

// dim_C(mu): h, h / log beta, h + int phi, h / int u for the four kinds.
double measure_dimension(const CStructure& s, const measures::MarkovMeasure& mu);

struct ConditionOptions {
  int max_depth = 16;
  int extra_depth = 4;      // depth_cap = l(C) + extra for the C1/C2 recursions
  int cylinder_depth = 6;   // C1/C2 test cylinders up to this length
  std::size_t max_cylinders = 4096;  // per length; longer lengths are skipped
  int max_m = 8;
};

struct ConditionReport {
  int depth = 0;
  int cylinder_depth = 0;
  std::vector<double> t_grid;
  double dimension = 0.0;      // dim_C(X), t at or above it is not tested for C1/C2
  double q1_estimate = 0.0;
  double q3_estimate = 1.0;
  // Per grid point: smallest passing m_blk, 0 when t >= dimension, -1 when
  // no m_blk up to max_m passes.
  std::vector<int> m_of_t;
  bool c1 = false;
  bool c2 = false;
  bool c3 = false;
  bool c4 = false;
};

ConditionReport check_conditions(const CStructure& s, int depth, std::vector<double> t_grid,
                                 const ConditionOptions& options = {});

struct RestrictedOptions {
  int depth = 4;          // W1 truncation depth of the membership test
  bool strict = false;    // test lexicographic min, max and a random tail
  std::uint64_t seed = 0;
  std::size_t max_tested = std::size_t{1} << 22;
  unsigned threads = 1;
};

struct RestrictedProbe {
  double value = 0.0;
  std::size_t tested = 0;     // cylinders whose membership was decided
  std::size_t survivors = 0;
};

// N^t_m(C(z) ∩ E(mu, n, eps)), with membership decided for cylinders at
// length min(n + depth - 1, depth_cap) by representative points.
RestrictedProbe restricted_outer_measure(const CStructure& s, std::span<const Symbol> z,
                                         const measures::MarkovMeasure& mu, std::size_t n,
                                         double eps, double t, int m_blk, int depth_cap,
                                         const RestrictedOptions& options = {});

}  // namespace elab::carath

#endif  // ELAB_CARATH_HPP_
