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

#include "elab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elab/error.hpp"

namespace elab {
namespace {

constexpr const char* kModule = "carath";

template <typename Visit>
void for_each_admissible_window(const LocalPotential& phi, const sofic::ShiftSpace& space,
                                Visit&& visit) {
  const int m = phi.alphabet_size();
  Word w(phi.window(), 1);
  for (std::size_t code = 0; code < phi.values().size(); ++code) {
    std::size_t r = code;
    for (int i = phi.window() - 1; i >= 0; --i, r /= m) w[i] = static_cast<Symbol>(r % m + 1);
    if (sofic::is_admissible(w, space)) visit(phi.values()[code]);
  }
}

}  // namespace

LocalPotential::LocalPotential(int alphabet_size, int window, std::vector<double> values)
    : m_(alphabet_size), k_(window), values_(std::move(values)) {
  if (m_ < 2 || k_ < 1) {
    throw Error(ErrorKind::kInput, kModule, "LocalPotential",
                "need alphabet size >= 2 and window >= 1");
  }
  double size = std::pow(static_cast<double>(m_), k_);
  if (size > 1 << 24 || values_.size() != static_cast<std::size_t>(size)) {
    throw Error(ErrorKind::kInput, kModule, "LocalPotential",
                "expected m^window = " + std::to_string(static_cast<long long>(size)) +
                    " values, got " + std::to_string(values_.size()));
  }
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return !std::isfinite(v); })) {
    throw Error(ErrorKind::kInput, kModule, "LocalPotential", "values must be finite");
  }
}

LocalPotential LocalPotential::constant(int alphabet_size, double c) {
  return LocalPotential(alphabet_size, 1, std::vector<double>(alphabet_size, c));
}

LocalPotential LocalPotential::first_symbol(std::vector<double> values) {
  const int m = static_cast<int>(values.size());
  return LocalPotential(m, 1, std::move(values));
}

double LocalPotential::operator()(std::span<const Symbol> word) const {
  std::size_t code = 0;
  for (int i = 0; i < k_; ++i) code = code * m_ + (word[i] - 1);
  return values_[code];
}

double LocalPotential::periodic_sum(std::span<const Symbol> word, std::size_t n) const {
  if (word.empty()) {
    throw Error(ErrorKind::kInput, kModule, "LocalPotential", "word is empty");
  }
  const std::size_t p = word.size();
  Word window(k_);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < k_; ++k) window[k] = word[(i + k) % p];
    total += (*this)(window);
  }
  return total;
}

double LocalPotential::min_over(const sofic::ShiftSpace& space) const {
  double best = std::numeric_limits<double>::infinity();
  for_each_admissible_window(*this, space, [&](double v) { best = std::min(best, v); });
  return best;
}

double LocalPotential::max_over(const sofic::ShiftSpace& space) const {
  double best = -std::numeric_limits<double>::infinity();
  for_each_admissible_window(*this, space, [&](double v) { best = std::max(best, v); });
  return best;
}

LocalPotential LocalPotential::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return LocalPotential(m_, k_, std::move(v));
}

}  // namespace elab
