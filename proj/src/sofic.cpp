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

#include "elab/sofic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elab/error.hpp"

namespace elab::sofic {
namespace {

constexpr const char* kModule = "sofic-core";

using BoolMatrix = std::vector<std::uint8_t>;

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b, int m) {
  BoolMatrix out(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      if (!a[i * m + k]) continue;
      for (int j = 0; j < m; ++j) out[i * m + j] |= b[k * m + j];
    }
  }
  return out;
}

// Wielandt: a primitive m x m matrix has A^((m-1)^2 + 1) > 0.
bool is_primitive(const BoolMatrix& a, int m) {
  std::uint64_t exponent = static_cast<std::uint64_t>(m - 1) * (m - 1) + 1;
  BoolMatrix result(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) result[i * m + i] = 1;
  BoolMatrix base = a;
  while (exponent > 0) {
    if (exponent & 1) result = bool_product(result, base, m);
    exponent >>= 1;
    if (exponent > 0) base = bool_product(base, base, m);
  }
  return std::all_of(result.begin(), result.end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace

ShiftSpace::ShiftSpace(int alphabet_size, std::vector<std::vector<int>> transition,
                       double beta)
    : m_(alphabet_size), beta_(beta) {
  if (m_ < 2 || m_ > 255) {
    throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                "alphabet size must lie in [2, 255], got " + std::to_string(m_));
  }
  if (!(beta_ > 1.0) || !std::isfinite(beta_)) {
    throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                "metric base beta must be a finite number > 1");
  }
  if (transition.size() != static_cast<std::size_t>(m_)) {
    throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                "transition matrix must have " + std::to_string(m_) + " rows");
  }
  transition_.assign(static_cast<std::size_t>(m_) * m_, 0);
  for (int i = 0; i < m_; ++i) {
    if (transition[i].size() != static_cast<std::size_t>(m_)) {
      throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                  "transition row " + std::to_string(i + 1) + " must have " +
                      std::to_string(m_) + " entries");
    }
    for (int j = 0; j < m_; ++j) {
      const int v = transition[i][j];
      if (v != 0 && v != 1) {
        throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                    "transition entries must be 0 or 1");
      }
      transition_[i * m_ + j] = static_cast<std::uint8_t>(v);
    }
  }
  for (int i = 0; i < m_; ++i) {
    bool row = false;
    bool col = false;
    for (int j = 0; j < m_; ++j) {
      row = row || transition_[i * m_ + j];
      col = col || transition_[j * m_ + i];
    }
    if (!row) {
      throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                  "transition row " + std::to_string(i + 1) + " is all zero");
    }
    if (!col) {
      throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                  "transition column " + std::to_string(i + 1) + " is all zero");
    }
  }
  if (!is_primitive(transition_, m_)) {
    throw Error(ErrorKind::kInvariant, kModule, "ShiftSpace",
                "transition matrix is not primitive (subshift is not mixing)");
  }
}

ShiftSpace ShiftSpace::full_shift(int m, double beta) {
  return ShiftSpace(m, std::vector<std::vector<int>>(m, std::vector<int>(m, 1)), beta);
}

ShiftSpace ShiftSpace::golden_mean(double beta) {
  return ShiftSpace(2, {{1, 1}, {1, 0}}, beta);
}

std::vector<std::vector<int>> ShiftSpace::transition_rows() const {
  std::vector<std::vector<int>> rows(m_, std::vector<int>(m_));
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) rows[i][j] = transition_[i * m_ + j];
  }
  return rows;
}

bool ShiftSpace::is_full_shift() const {
  return std::all_of(transition_.begin(), transition_.end(),
                     [](std::uint8_t v) { return v != 0; });
}

double ShiftSpace::tail_bound(int depth) const {
  return (m_ - 1) * std::pow(beta_, -depth) / (beta_ - 1.0);
}

void check_symbols(std::span<const Symbol> word, const ShiftSpace& space) {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] < 1 || word[i] > space.alphabet_size()) {
      throw Error(ErrorKind::kInput, kModule, "is_admissible",
                  "symbol " + std::to_string(word[i]) + " at position " +
                      std::to_string(i + 1) + " is outside 1.." +
                      std::to_string(space.alphabet_size()));
    }
  }
}

bool is_admissible(std::span<const Symbol> word, const ShiftSpace& space) {
  check_symbols(word, space);
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!space.allowed(word[i], word[i + 1])) return false;
  }
  return true;
}

Word connector(std::span<const Symbol> u, std::span<const Symbol> v,
               const ShiftSpace& space, int block, bool allow_empty) {
  if (block < 1) {
    throw Error(ErrorKind::kInput, kModule, "connector", "block must be >= 1");
  }
  if (!is_admissible(u, space) || !is_admissible(v, space)) {
    throw Error(ErrorKind::kInput, kModule, "connector",
                "connector endpoints must be admissible words");
  }
  const int m = space.alphabet_size();
  const bool has_end = !v.empty();
  const Symbol first_v = has_end ? v.front() : 0;
  const Symbol last_u = u.empty() ? 0 : u.back();

  if (allow_empty && (u.empty() || v.empty() || space.allowed(last_u, first_v))) {
    return {};
  }

  // finishes[k][s]: some admissible word of length k starts with s and can be
  // followed by v.
  const int max_len = ((m - 1) * (m - 1) + 2) * block;
  std::vector<std::vector<std::uint8_t>> finishes(max_len + 1,
                                                  std::vector<std::uint8_t>(m + 1, 0));
  for (int s = 1; s <= m; ++s) {
    finishes[1][s] = !has_end || space.allowed(static_cast<Symbol>(s), first_v);
  }
  for (int k = 2; k <= max_len; ++k) {
    for (int s = 1; s <= m; ++s) {
      for (int t = 1; t <= m && !finishes[k][s]; ++t) {
        finishes[k][s] = space.allowed(static_cast<Symbol>(s), static_cast<Symbol>(t)) &&
                         finishes[k - 1][t];
      }
    }
  }

  for (int len = block; len <= max_len; len += block) {
    Word bridge;
    bridge.reserve(len);
    Symbol prev = last_u;
    bool ok = true;
    for (int pos = 0; pos < len && ok; ++pos) {
      const int remaining = len - pos;
      ok = false;
      for (int s = 1; s <= m; ++s) {
        const bool enters = prev == 0 || space.allowed(prev, static_cast<Symbol>(s));
        if (enters && finishes[remaining][s]) {
          bridge.push_back(static_cast<Symbol>(s));
          prev = static_cast<Symbol>(s);
          ok = true;
          break;
        }
      }
    }
    if (ok) return bridge;
  }
  throw Error(ErrorKind::kInvariant, kModule, "connector",
              "no bridge found within the primitivity bound");
}

int specification_constant(const ShiftSpace& space, int block) {
  int tau = 0;
  const int m = space.alphabet_size();
  for (int a = 1; a <= m; ++a) {
    for (int b = 1; b <= m; ++b) {
      const Word u{static_cast<Symbol>(a)};
      const Word v{static_cast<Symbol>(b)};
      tau = std::max(tau, static_cast<int>(connector(u, v, space, block).size()));
    }
  }
  return tau;
}

PointPrefix PointPrefix::periodic(Word prefix, Word repeat, const ShiftSpace& space) {
  if (repeat.empty()) {
    throw Error(ErrorKind::kInput, kModule, "PointPrefix",
                "periodic tail needs a nonempty repeat word");
  }
  Word check = prefix;
  check.insert(check.end(), repeat.begin(), repeat.end());
  check.push_back(repeat.front());
  if (!is_admissible(check, space)) {
    throw Error(ErrorKind::kInvariant, kModule, "PointPrefix",
                "prefix followed by the periodic tail is not admissible");
  }
  PointPrefix p;
  p.kind_ = TailKind::kPeriodic;
  p.prefix_length_ = prefix.size();
  p.symbols_ = std::move(prefix);
  p.repeat_ = std::move(repeat);
  return p;
}

PointPrefix PointPrefix::generated(Word symbols, std::size_t prefix_length,
                                   GeneratorTail tail, const ShiftSpace& space) {
  if (prefix_length > symbols.size()) {
    throw Error(ErrorKind::kInput, kModule, "PointPrefix",
                "prefix length exceeds the materialized symbols");
  }
  if (!is_admissible(symbols, space)) {
    throw Error(ErrorKind::kInvariant, kModule, "PointPrefix",
                "generated point is not admissible");
  }
  PointPrefix p;
  p.kind_ = TailKind::kGenerator;
  p.symbols_ = std::move(symbols);
  p.prefix_length_ = prefix_length;
  p.generator_ = std::move(tail);
  return p;
}

std::size_t PointPrefix::usable_depth() const {
  return kind_ == TailKind::kPeriodic ? kUnbounded : symbols_.size();
}

Symbol PointPrefix::at(std::size_t index) const {
  if (index < prefix_length_ || (kind_ == TailKind::kGenerator && index < symbols_.size())) {
    return symbols_[index];
  }
  if (kind_ == TailKind::kPeriodic) {
    return repeat_[(index - prefix_length_) % repeat_.size()];
  }
  throw Error(ErrorKind::kDepth, kModule, "PointPrefix",
              "index " + std::to_string(index + 1) + " exceeds usable depth " +
                  std::to_string(symbols_.size()));
}

Word PointPrefix::materialize(std::size_t length) const {
  if (length > usable_depth()) {
    throw Error(ErrorKind::kDepth, kModule, "PointPrefix",
                "requested " + std::to_string(length) + " symbols but usable depth is " +
                    std::to_string(usable_depth()));
  }
  if (kind_ == TailKind::kGenerator) {
    return Word(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(length));
  }
  Word out;
  out.reserve(length);
  const std::size_t head = std::min(length, prefix_length_);
  out.insert(out.end(), symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(head));
  while (out.size() < length) {
    const std::size_t take = std::min(repeat_.size(), length - out.size());
    out.insert(out.end(), repeat_.begin(), repeat_.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

MetricValue truncated_metric(const PointPrefix& x, const PointPrefix& y, int depth,
                             const ShiftSpace& space) {
  if (depth < 0) {
    throw Error(ErrorKind::kInput, kModule, "truncated_metric", "depth must be >= 0");
  }
  const auto d = static_cast<std::size_t>(depth);
  if (d > x.usable_depth() || d > y.usable_depth()) {
    throw Error(ErrorKind::kDepth, kModule, "truncated_metric",
                "depth " + std::to_string(depth) + " exceeds the usable depth of an argument");
  }
  MetricValue out;
  double scale = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    scale /= space.beta();
    out.value += std::abs(static_cast<int>(x.at(j)) - static_cast<int>(y.at(j))) * scale;
  }
  out.error_bound = space.tail_bound(depth);
  return out;
}

double log_perron_root(std::span<const double> matrix, std::size_t n) {
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> w(n);
  double log_lambda = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += matrix[i * n + j] * v[j];
      w[i] = acc;
    }
    const double norm = std::accumulate(w.begin(), w.end(), 0.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = w[i] / norm;
      change = std::max(change, std::abs(next - v[i]));
      v[i] = next;
    }
    // v is normalized to unit l1 norm, so norm is the Rayleigh-type estimate.
    log_lambda = std::log(norm);
    if (change < 1e-15 && std::abs(log_lambda - previous) < 1e-15) break;
    previous = log_lambda;
  }
  return log_lambda;
}

double topological_entropy(const ShiftSpace& space) {
  const int m = space.alphabet_size();
  std::vector<double> a(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a[i * m + j] = space.entry(i, j);
  }
  return log_perron_root(a, static_cast<std::size_t>(m));
}

std::uint64_t count_admissible(const ShiftSpace& space, int n) {
  if (n < 1) {
    throw Error(ErrorKind::kInput, kModule, "count_admissible", "n must be >= 1");
  }
  const int m = space.alphabet_size();
  std::vector<std::uint64_t> ending(m, 1);
  for (int step = 1; step < n; ++step) {
    std::vector<std::uint64_t> next(m, 0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (!space.entry(i, j)) continue;
        if (__builtin_add_overflow(next[j], ending[i], &next[j])) {
          throw Error(ErrorKind::kOverflow, kModule, "count_admissible",
                      "count of admissible words of length " + std::to_string(n) +
                          " overflows 64 bits");
        }
      }
    }
    ending = std::move(next);
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : ending) {
    if (__builtin_add_overflow(total, c, &total)) {
      throw Error(ErrorKind::kOverflow, kModule, "count_admissible",
                  "count of admissible words of length " + std::to_string(n) +
                      " overflows 64 bits");
    }
  }
  return total;
}

}  // namespace elab::sofic
