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

#ifndef ELAB_CONSTRUCT_HPP_
#define ELAB_CONSTRUCT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elab/measures.hpp"
#include "elab/potential.hpp"

namespace elab::construct {

using measures::MarkovMeasure;
using sofic::ShiftSpace;

struct MeasureFamily {
  std::vector<MarkovMeasure> measures;
  // Dimension of each measure under the active structure.
  std::vector<double> dims;
};

// Checks that all measures share one space and are pairwise distinct on some
// cylinder of length <= 4 (by more than 1e-9).
MeasureFamily make_family(std::vector<MarkovMeasure> measures, std::vector<double> dims);

// Rank of the matrix of cylinder probabilities (rows: measures, columns: all
// admissible words of length <= depth). Full rank is a necessary condition
// for linear independence, not a proof of it.
int cylinder_rank(const MeasureFamily& family, int depth = 4);

struct SimplexNet {
  int level = 0;
  double mesh = 0.0;
  int denominator = 1;
  std::vector<std::vector<double>> nodes;
  std::size_t cardinality() const { return nodes.size(); }
};

// All points of A_L with coordinates in (1/q)Z, q = ceil((L + 1) / mesh),
// in lexicographic order of the numerators (largest first coordinate first).
SimplexNet simplex_net(int level, double mesh, std::size_t cap = 100000);

// L1 distance from t to the net node obtained by largest-remainder rounding;
// an upper bound on the distance from t to the net.
double rounding_distance(const SimplexNet& net, const std::vector<double>& t);

struct Block {
  int level;
  int j;  // 0-based node index within the level's net
  int ell;
  std::size_t length;
};

struct Itinerary {
  int first_level = 1;
  int max_level = 0;
  std::vector<double> eps_tilde;  // indexed by level
  std::vector<double> eps_hat;
  std::vector<SimplexNet> nets;   // indexed by level (unused below first_level)
  std::vector<std::vector<std::size_t>> gamma_n;  // [level][ell]
  std::vector<Block> blocks;      // lexicographic order in (level, j, ell)
  std::size_t block_total() const;
};

// eps_hat_L = 2^-L / max(1, L J(L)).
double default_eps_hat(int level, std::size_t net_size);
// eps_tilde_L = 1 / (L + 2).
double default_eps_tilde(int level);

struct ScheduleOptions {
  std::size_t max_group_length = std::size_t{1} << 40;
};

// Finds, group by group, locally minimal integer block lengths satisfying
// the prefix-growth, proportion and Gamma-entry inequalities.
Itinerary block_schedule(const MeasureFamily& family, int max_level,
                         std::vector<double> eps_tilde, std::vector<double> eps_hat,
                         std::vector<std::vector<std::size_t>> gamma_n,
                         std::vector<SimplexNet> nets, const ScheduleOptions& options = {});

struct Violation {
  std::string inequality;  // "eq:0729b1", "eq:0725a", "eq:0725b", "eq:0729a1", "entry", "positive"
  std::size_t group;       // index of the (level, j) group, or npos for global checks
  int ell;
  double lhs;
  double rhs;
};

// Re-evaluates every itinerary inequality from its definition.
std::vector<Violation> check_itinerary(const Itinerary& it);

struct DimFilter {
  LocalPotential u;
  double threshold;
};

struct TypicalOptions {
  int depth = 8;
  std::size_t max_attempts = 10000;
  // Also require closeness at these earlier lengths (the Gamma sets ask for
  // all n beyond the threshold; by default only the endpoint is tested).
  std::vector<std::size_t> extra_checks;
};

// Length-n word whose periodic empirical measure is within eps of mu in
// truncated W1 (and passes the dimension filter if given).
Word typical_word(const MarkovMeasure& mu, std::size_t n, double eps, std::uint64_t seed,
                  const std::optional<DimFilter>& filter = std::nullopt,
                  const TypicalOptions& options = {});

struct GammaOptions {
  std::size_t samples = 200;
  std::size_t cap = std::size_t{1} << 16;
  int depth = 8;
  std::uint64_t seed = 0;
};

// Smallest n (searched over a doubling grid refined by bisection) at which
// at least (1 - eps_hat) of the sampled length-n words pass the closeness
// test at eps_tilde.
std::size_t estimate_gamma_n(const MarkovMeasure& mu, double eps_tilde, double eps_hat,
                             const std::optional<DimFilter>& filter = std::nullopt,
                             const GammaOptions& options = {});

// Fills in the defaults and estimates the Gamma thresholds, then runs
// block_schedule. Schedules left empty use default_eps_tilde and
// default_eps_hat; net meshes left empty use L + 1 (the vertices of A_L).
struct PlanOptions {
  int max_level = 1;
  std::vector<double> eps_tilde;
  std::vector<double> eps_hat;
  std::vector<double> net_mesh;
  std::optional<std::vector<std::vector<std::size_t>>> gamma_n;
  GammaOptions gamma;
  std::optional<DimFilter> filter;
  ScheduleOptions schedule;
  std::size_t net_cap = 100000;
  unsigned threads = 1;
};

Itinerary plan_itinerary(const MeasureFamily& family, const PlanOptions& options);

struct BlockSpan {
  std::size_t start;
  std::size_t end;
  int level;
  int j;
  int ell;
};

struct ConstructedOrbit {
  Word word;
  std::vector<BlockSpan> spans;
  std::vector<std::size_t> connectors;  // connector before block i (0 for the first)
  std::vector<std::uint64_t> block_seeds;
};

struct OrbitOptions {
  TypicalOptions typical;
  std::optional<DimFilter> filter;
  unsigned threads = 1;
};

ConstructedOrbit build_orbit(const Itinerary& it, const MeasureFamily& family,
                             const ShiftSpace& space, std::uint64_t seed,
                             const OrbitOptions& options = {});

// log of the product over blocks ending by prefix_len of mu^(ell)(block word).
double log_lambda_measure(const ConstructedOrbit& orbit, const MeasureFamily& family,
                          std::size_t prefix_len);
double lambda_measure(const ConstructedOrbit& orbit, const MeasureFamily& family,
                      std::size_t prefix_len);

struct NodeCheck {
  std::vector<double> weights;
  bool reachable = false;
  double distance = 0.0;  // min over boundary times of truncated W1
  std::size_t time = 0;   // where the minimum is attained
  bool pass = false;
};

struct SaturationReport {
  int level = 0;
  double threshold = 0.0;
  double truncation_bound = 0.0;
  std::vector<NodeCheck> nodes;
  bool pass = false;
};

// For each node t, the minimum over block-boundary times n of
// W1(delta_x^n, mu_t); pass iff each reachable minimum is at most
// eps_tilde_level + slack + truncation bound and no node is unreachable.
SaturationReport verify_saturation(const ConstructedOrbit& orbit, const Itinerary& it,
                                   const SimplexNet& net, const MeasureFamily& family,
                                   double slack, int depth = 8);

// Alternating blocks from two measures whose lengths grow by `ratio`.
Word oscillating_orbit(const MarkovMeasure& a, const MarkovMeasure& b, std::size_t first_block,
                       double ratio, std::size_t length, std::uint64_t seed);

}  // namespace elab::construct

#endif  // ELAB_CONSTRUCT_HPP_
