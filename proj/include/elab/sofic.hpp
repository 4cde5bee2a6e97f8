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

#ifndef ELAB_SOFIC_HPP_
#define ELAB_SOFIC_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elab {

// Symbols are 1-based everywhere: the alphabet is {1, ..., m}.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

}  // namespace elab

namespace elab::sofic {

// A one-sided subshift of finite type on {1..m} with the metric
// d(x, y) = sum_j |x_j - y_j| / beta^j. Construction rejects transition
// matrices with dead symbols or that are not primitive (not mixing).
class ShiftSpace {
 public:
  ShiftSpace(int alphabet_size, std::vector<std::vector<int>> transition,
             double beta);

  static ShiftSpace full_shift(int m, double beta = 2.0);
  // Transition rows (1,1), (1,0): the word "22" is forbidden.
  static ShiftSpace golden_mean(double beta = 2.0);

  int alphabet_size() const { return m_; }
  double beta() const { return beta_; }
  bool allowed(Symbol from, Symbol to) const {
    return transition_[static_cast<std::size_t>(from - 1) * m_ + (to - 1)] != 0;
  }
  int entry(int row, int col) const {
    return transition_[static_cast<std::size_t>(row) * m_ + col];
  }
  std::vector<std::vector<int>> transition_rows() const;
  bool is_full_shift() const;

  // sup over all pairs of d(x, y).
  double diameter() const { return (m_ - 1) / (beta_ - 1.0); }
  // Upper bound on the metric contribution of coordinates beyond `depth`.
  double tail_bound(int depth) const;

  friend bool operator==(const ShiftSpace& a, const ShiftSpace& b) {
    return a.m_ == b.m_ && a.beta_ == b.beta_ && a.transition_ == b.transition_;
  }

 private:
  int m_;
  double beta_;
  std::vector<std::uint8_t> transition_;  // row-major m x m
};

// Throws ErrorKind::kInput when a symbol lies outside 1..m.
void check_symbols(std::span<const Symbol> word, const ShiftSpace& space);

bool is_admissible(std::span<const Symbol> word, const ShiftSpace& space);

// Shortest bridge w with |w| a multiple of `block` such that u w v is
// admissible; ties go to the lexicographically smallest w. An empty bridge is
// only returned when allow_empty is set.
Word connector(std::span<const Symbol> u, std::span<const Symbol> v,
               const ShiftSpace& space, int block = 1, bool allow_empty = true);

// Largest minimal bridge length over all ordered symbol pairs (the
// specification constant at the given block granularity).
int specification_constant(const ShiftSpace& space, int block = 1);

// A finite stand-in for an infinite point: an explicit prefix plus a rule
// that defines the tail. Periodic tails are defined at every depth; generated
// tails are materialized once and trusted up to usable_depth().
class PointPrefix {
 public:
  enum class TailKind { kPeriodic, kGenerator };

  struct GeneratorTail {
    std::uint64_t seed = 0;
    std::string measure_id;
  };

  // prefix followed by repeat repeated forever; the concatenation must be
  // admissible including the wrap from the end of repeat to its start.
  static PointPrefix periodic(Word prefix, Word repeat, const ShiftSpace& space);
  static PointPrefix periodic(Word repeat, const ShiftSpace& space) {
    return periodic({}, std::move(repeat), space);
  }
  // `symbols` holds the prefix followed by an already materialized tail.
  static PointPrefix generated(Word symbols, std::size_t prefix_length,
                               GeneratorTail tail, const ShiftSpace& space);

  TailKind tail_kind() const { return kind_; }
  const GeneratorTail& generator() const { return generator_; }
  std::span<const Symbol> prefix() const {
    return std::span<const Symbol>(symbols_).first(prefix_length_);
  }
  const Word& repeat_word() const { return repeat_; }

  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  std::size_t usable_depth() const;

  // 0-based access: at(0) is x_1. Throws ErrorKind::kDepth beyond the
  // usable depth.
  Symbol at(std::size_t index) const;
  // The first `length` symbols.
  Word materialize(std::size_t length) const;

 private:
  PointPrefix() = default;

  TailKind kind_ = TailKind::kPeriodic;
  Word symbols_;
  std::size_t prefix_length_ = 0;
  Word repeat_;
  GeneratorTail generator_;
};

struct MetricValue {
  double value = 0.0;
  // The true distance lies in [value, value + error_bound].
  double error_bound = 0.0;
};

MetricValue truncated_metric(const PointPrefix& x, const PointPrefix& y,
                             int depth, const ShiftSpace& space);

// Log of the Perron eigenvalue of the transition matrix.
double topological_entropy(const ShiftSpace& space);

// Number of admissible words of length n; throws ErrorKind::kOverflow when
// the count does not fit in 64 bits.
std::uint64_t count_admissible(const ShiftSpace& space, int n);

// Log of the Perron root of a nonnegative primitive n x n matrix (row-major),
// by normalized power iteration to relative tolerance 1e-12.
double log_perron_root(std::span<const double> matrix, std::size_t n);

}  // namespace elab::sofic

#endif  // ELAB_SOFIC_HPP_
