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

#ifndef ELAB_MEASURES_HPP_
#define ELAB_MEASURES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elab/sofic.hpp"

namespace elab::measures {

using sofic::MetricValue;
using sofic::PointPrefix;
using sofic::ShiftSpace;

class MarkovMeasure {
 public:
  // Rows of `stochastic` must sum to 1 within 1e-12 and put mass only on
  // allowed transitions. Without `stationary` it is found by power iteration.
  MarkovMeasure(ShiftSpace space, std::vector<std::vector<double>> stochastic,
                std::optional<std::vector<double>> stationary = std::nullopt);

  // i.i.d. symbols with the given probabilities on the full shift.
  static MarkovMeasure bernoulli(std::vector<double> probs, double beta = 2.0);
  // Measure of maximal entropy.
  static MarkovMeasure parry(const ShiftSpace& space);

  const ShiftSpace& space() const { return space_; }
  int alphabet_size() const { return space_.alphabet_size(); }
  // 1-based symbols.
  double transition(Symbol from, Symbol to) const {
    return p_[static_cast<std::size_t>(from - 1) * alphabet_size() + (to - 1)];
  }
  double stationary(Symbol s) const { return pi_[s - 1]; }
  const std::vector<double>& stationary_vector() const { return pi_; }
  std::vector<std::vector<double>> stochastic_rows() const;

 private:
  ShiftSpace space_;
  std::vector<double> p_;  // row-major m x m
  std::vector<double> pi_;
};

// Weighted atoms, each identified by its first `depth` symbols. Atoms are
// kept as base-m codes (first symbol most significant), sorted and merged.
class FinSuppMeasure {
 public:
  struct Atom {
    std::uint64_t code;
    double weight;
  };

  // Weights must be >= 0 and sum to 1 within 1e-12. Duplicate codes merge.
  FinSuppMeasure(int alphabet_size, double beta, int depth, std::vector<Atom> atoms);

  // Atoms given as points truncated at `depth`.
  static FinSuppMeasure from_points(std::span<const PointPrefix> points,
                                    std::span<const double> weights, int depth,
                                    const ShiftSpace& space);

  int alphabet_size() const { return m_; }
  double beta() const { return beta_; }
  int depth() const { return depth_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  Word word(std::size_t index) const;

  // Pushforward to the first `depth` symbols (depth <= this->depth()).
  FinSuppMeasure truncate(int depth) const;

 private:
  int m_;
  double beta_;
  int depth_;
  std::vector<Atom> atoms_;
};

// Largest depth whose codes fit in 63 bits for alphabet size m.
int max_code_depth(int m);
std::uint64_t encode(std::span<const Symbol> word, int m);

class MarkovMixture {
 public:
  MarkovMixture(std::vector<MarkovMeasure> components, std::vector<double> weights);

  const std::vector<MarkovMeasure>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<MarkovMeasure> components_;
  std::vector<double> weights_;
};

// Uniform measure on the shifts 0..n-1 of x, each seen through `depth`
// symbols. Needs usable_depth(x) >= n + depth - 1.
FinSuppMeasure empirical_measure(const PointPrefix& x, std::size_t n, int depth,
                                 const ShiftSpace& space);
// Same for a materialized symbol stream: shifts 0..n-1 of `symbols`.
FinSuppMeasure empirical_measure(std::span<const Symbol> symbols, std::size_t n, int depth,
                                 const ShiftSpace& space);
// Windows starting at positions 0..count-1 of the concatenation body tail.
FinSuppMeasure window_measure(std::span<const Symbol> body, std::span<const Symbol> tail,
                              std::size_t count, int depth, const ShiftSpace& space);
// `word` viewed as the periodic point word word word ...
FinSuppMeasure periodic_empirical_measure(std::span<const Symbol> word, int depth,
                                          const ShiftSpace& space);

struct TransportOptions {
  std::size_t max_atoms = 4096;
};

// Exact W1 under the ground cost truncated at `depth`. The true distance lies
// in [value, value + error_bound].
MetricValue wasserstein1(const FinSuppMeasure& mu, const FinSuppMeasure& nu, int depth,
                         const TransportOptions& options = {});

double cylinder_probability(const MarkovMeasure& mu, std::span<const Symbol> u);
double log_cylinder_probability(const MarkovMeasure& mu, std::span<const Symbol> u);

// Law of the first `depth` symbols under mu (all admissible words with
// positive probability).
FinSuppMeasure cylinder_distribution(const MarkovMeasure& mu, int depth);
FinSuppMeasure cylinder_distribution(const MarkovMixture& mix, int depth);

double measure_entropy(const MarkovMeasure& mu);

// Stationary chain of length n. With `start` the first symbol is fixed.
Word sample_generic(const MarkovMeasure& mu, std::size_t n, std::uint64_t seed,
                    std::optional<Symbol> start = std::nullopt);

PointPrefix generic_point(const MarkovMeasure& mu, std::size_t length, std::uint64_t seed,
                          std::string measure_id = "");

struct ProxyOptions {
  std::size_t samples = 4096;
  int depth = 8;
};

// Sampled stand-in for the mixture: `samples` words of length n, component l
// receiving its largest-remainder share of t_l * samples, each word kept
// through options.depth symbols.
FinSuppMeasure mixture_distance_proxy(const MarkovMixture& mix, std::size_t n,
                                      std::uint64_t seed, const ProxyOptions& options = {});

}  // namespace elab::measures

#endif  // ELAB_MEASURES_HPP_
