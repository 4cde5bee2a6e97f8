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

#ifndef ELAB_POTENTIAL_HPP_
#define ELAB_POTENTIAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "elab/sofic.hpp"

namespace elab {

// A potential that depends on the first `window` coordinates only. Values
// are indexed by the base-m code of the window word (first symbol most
// significant); entries for inadmissible words are ignored.
class LocalPotential {
 public:
  LocalPotential(int alphabet_size, int window, std::vector<double> values);

  static LocalPotential constant(int alphabet_size, double c);
  // phi(x) = values[x_1 - 1].
  static LocalPotential first_symbol(std::vector<double> values);

  int alphabet_size() const { return m_; }
  int window() const { return k_; }
  const std::vector<double>& values() const { return values_; }

  // `word` must hold at least window() symbols; only the first are read.
  double operator()(std::span<const Symbol> word) const;

  // S_n phi at x where x continues `word` periodically.
  double periodic_sum(std::span<const Symbol> word, std::size_t n) const;

  // Extremes over admissible windows of `space`.
  double min_over(const sofic::ShiftSpace& space) const;
  double max_over(const sofic::ShiftSpace& space) const;

  LocalPotential scaled(double factor) const;

 private:
  int m_;
  int k_;
  std::vector<double> values_;
};

}  // namespace elab

#endif  // ELAB_POTENTIAL_HPP_
