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

#include "elab/measures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elab/error.hpp"
#include "elab/rng.hpp"

namespace elab::measures {
namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

MarkovMeasure golden_parry_by_hand() {
  const double g = kGolden;
  return MarkovMeasure(ShiftSpace::golden_mean(), {{1 / g, 1 / (g * g)}, {1.0, 0.0}},
                       std::vector<double>{g * g / (1 + g * g), 1 / (1 + g * g)});
}

Word random_word(Rng& rng, int m, std::size_t len) {
  Word w(len);
  for (auto& s : w) s = static_cast<Symbol>(rng.below(m) + 1);
  return w;
}

TEST(MarkovMeasureTest, Validation) {
  const auto golden = ShiftSpace::golden_mean();
  EXPECT_THROW(MarkovMeasure(golden, {{0.5, 0.5}, {0.5, 0.5}}), Error);
  EXPECT_THROW(MarkovMeasure(ShiftSpace::full_shift(2), {{0.5, 0.6}, {0.5, 0.5}}), Error);
  EXPECT_THROW(MarkovMeasure(ShiftSpace::full_shift(2), {{0.5, 0.5}, {0.5, 0.5}},
                             std::vector<double>{0.9, 0.1}),
               Error);
  const MarkovMeasure sticky(ShiftSpace::full_shift(2), {{0.9, 0.1}, {0.3, 0.7}});
  EXPECT_NEAR(sticky.stationary(1), 0.75, 1e-12);
  EXPECT_NEAR(sticky.stationary(2), 0.25, 1e-12);
}

TEST(MarkovMeasureTest, ParryMatchesHandComputation) {
  const auto parry = MarkovMeasure::parry(ShiftSpace::golden_mean());
  const auto hand = golden_parry_by_hand();
  for (Symbol i = 1; i <= 2; ++i) {
    EXPECT_NEAR(parry.stationary(i), hand.stationary(i), 1e-12);
    for (Symbol j = 1; j <= 2; ++j) EXPECT_NEAR(parry.transition(i, j), hand.transition(i, j), 1e-12);
  }
}

TEST(CylinderTest, Examples) {
  const auto bern = MarkovMeasure::bernoulli({0.3, 0.7});
  EXPECT_DOUBLE_EQ(cylinder_probability(bern, Word{1, 2}), 0.3 * 0.7);
  EXPECT_EQ(cylinder_probability(bern, Word{}), 1.0);
  const auto parry = golden_parry_by_hand();
  EXPECT_NEAR(cylinder_probability(parry, Word{1, 1}), parry.stationary(1) / kGolden, 1e-15);
  EXPECT_NEAR(log_cylinder_probability(parry, Word{1, 2, 1}),
              std::log(cylinder_probability(parry, Word{1, 2, 1})), 1e-14);
}

TEST(CylinderTest, MultiplicativeAndNormalized) {
  Rng rng(8);
  const MarkovMeasure mu(ShiftSpace::full_shift(3),
                         {{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}});
  for (int trial = 0; trial < 200; ++trial) {
    const Word u = random_word(rng, 3, 1 + rng.below(6));
    const Word v = random_word(rng, 3, 1 + rng.below(6));
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    double direct = mu.stationary(uv[0]);
    for (std::size_t i = 0; i + 1 < uv.size(); ++i) direct *= mu.transition(uv[i], uv[i + 1]);
    const double chained = cylinder_probability(mu, u) * mu.transition(u.back(), v.front()) *
                           cylinder_probability(mu, v) / mu.stationary(v.front());
    EXPECT_NEAR(cylinder_probability(mu, uv), direct, 1e-15);
    EXPECT_NEAR(cylinder_probability(mu, uv), chained, 1e-14);
  }
  for (const auto& nu : {mu, golden_parry_by_hand(), MarkovMeasure::bernoulli({0.1, 0.9})}) {
    for (int n = 1; n <= 10; ++n) {
      const int m = nu.alphabet_size();
      double total = 0.0;
      long count = 1;
      for (int i = 0; i < n; ++i) count *= m;
      for (long idx = 0; idx < count; ++idx) {
        Word w(n);
        long r = idx;
        for (int i = n - 1; i >= 0; --i, r /= m) w[i] = static_cast<Symbol>(r % m + 1);
        if (sofic::is_admissible(w, nu.space())) total += cylinder_probability(nu, w);
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(EntropyTest, Examples) {
  EXPECT_NEAR(measure_entropy(MarkovMeasure::bernoulli({0.5, 0.5})), std::log(2.0), 1e-15);
  EXPECT_EQ(measure_entropy(MarkovMeasure::bernoulli({1.0, 0.0})), 0.0);
  EXPECT_NEAR(measure_entropy(golden_parry_by_hand()), std::log(kGolden), 1e-12);
}

TEST(EntropyTest, BoundedByTopologicalEntropy) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const auto space = trial % 2 ? ShiftSpace::full_shift(m) : ShiftSpace::golden_mean();
    const int k = space.alphabet_size();
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) {
        if (space.entry(i, j)) s += rows[i][j] = rng.uniform() + 1e-3;
      }
      for (int j = 0; j < k; ++j) rows[i][j] /= s;
    }
    const MarkovMeasure mu(space, rows);
    EXPECT_LE(measure_entropy(mu), sofic::topological_entropy(space) + 1e-9);
  }
}

TEST(EmpiricalTest, Examples) {
  const auto full = ShiftSpace::full_shift(2);
  const auto fixed = sofic::PointPrefix::periodic(Word{1}, full);
  auto e = empirical_measure(fixed, 5, 6, full);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.atoms()[0].weight, 1.0);
  const auto alt = sofic::PointPrefix::periodic(Word{1, 2}, full);
  e = empirical_measure(alt, 2, 6, full);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.atoms()[0].weight, 0.5);
  EXPECT_EQ(e.word(0), (Word{1, 2, 1, 2, 1, 2}));
  Rng rng(1);
  const auto g = sofic::PointPrefix::generated(random_word(rng, 2, 20), 0, {}, full);
  e = empirical_measure(g, 7, 3, full);
  double total = 0.0;
  for (const auto& a : e.atoms()) {
    total += a.weight;
    EXPECT_NEAR(std::fmod(a.weight * 7, 1.0), 0.0, 1e-12);
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_THROW(empirical_measure(g, 19, 3, full), Error);
  EXPECT_NO_THROW(empirical_measure(g, 18, 3, full));
}

TEST(WassersteinTest, PointMassesAndIdentity) {
  const auto full = ShiftSpace::full_shift(3, 2.5);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = sofic::PointPrefix::periodic(random_word(rng, 3, 4), random_word(rng, 3, 3), full);
    const auto y = sofic::PointPrefix::periodic(random_word(rng, 3, 2), random_word(rng, 3, 5), full);
    const double one = 1.0;
    const auto dx = FinSuppMeasure::from_points({&x, 1}, {&one, 1}, 12, full);
    const auto dy = FinSuppMeasure::from_points({&y, 1}, {&one, 1}, 12, full);
    const auto w = wasserstein1(dx, dy, 12);
    const auto d = sofic::truncated_metric(x, y, 12, full);
    EXPECT_NEAR(w.value, d.value, 1e-15);
    EXPECT_DOUBLE_EQ(w.error_bound, d.error_bound);
    EXPECT_EQ(wasserstein1(dx, dx, 12).value, 0.0);
  }
}

double best_permutation(const std::vector<double>& cost, std::size_t n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

TEST(WassersteinTest, MatchesPermutationOracleOnUniformAtoms) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(2));
    const auto space = ShiftSpace::full_shift(m, 2.0 + rng.uniform());
    const std::size_t n = 1 + rng.below(6);
    const int depth = 1 + static_cast<int>(rng.below(6));
    std::vector<sofic::PointPrefix> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(sofic::PointPrefix::periodic(random_word(rng, m, 1 + rng.below(3)), space));
      ys.push_back(sofic::PointPrefix::periodic(random_word(rng, m, 1 + rng.below(3)), space));
    }
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cost[i * n + j] = sofic::truncated_metric(xs[i], ys[j], depth, space).value;
      }
    }
    const std::vector<double> w(n, 1.0 / n);
    const auto mu = FinSuppMeasure::from_points(xs, w, depth, space);
    const auto nu = FinSuppMeasure::from_points(ys, w, depth, space);
    EXPECT_NEAR(wasserstein1(mu, nu, depth).value, best_permutation(cost, n), 1e-12);
  }
}

TEST(WassersteinTest, FourPeriodicPointsHandEnumeration) {
  const auto full = ShiftSpace::full_shift(2);
  const sofic::PointPrefix pts[4] = {
      sofic::PointPrefix::periodic(Word{1}, full), sofic::PointPrefix::periodic(Word{2}, full),
      sofic::PointPrefix::periodic(Word{1, 2}, full),
      sofic::PointPrefix::periodic(Word{1, 1, 2}, full)};
  const int depth = 16;
  auto d = [&](int i, int j) { return sofic::truncated_metric(pts[i], pts[j], depth, full).value; };
  const double half[2] = {0.5, 0.5};
  const auto mu = FinSuppMeasure::from_points({pts, 2}, half, depth, full);
  const auto nu = FinSuppMeasure::from_points({pts + 2, 2}, half, depth, full);
  const double expected = 0.5 * std::min(d(0, 2) + d(1, 3), d(0, 3) + d(1, 2));
  EXPECT_NEAR(wasserstein1(mu, nu, depth).value, expected, 1e-15);
}

TEST(WassersteinTest, TruncationPushforwardAndCaps) {
  Rng rng(4);
  const auto full = ShiftSpace::full_shift(2);
  const Word a = random_word(rng, 2, 300), b = random_word(rng, 2, 300);
  const auto ea = empirical_measure(a, 280, 12, full);
  const auto eb = empirical_measure(b, 280, 12, full);
  EXPECT_NEAR(wasserstein1(ea, eb, 6).value, wasserstein1(ea.truncate(6), eb.truncate(6), 6).value,
              1e-15);
  EXPECT_LE(wasserstein1(ea, eb, 6).value, wasserstein1(ea, eb, 12).value + 1e-15);
  try {
    wasserstein1(ea, eb, 12, {.max_atoms = 100});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSize);
  }
  EXPECT_THROW(wasserstein1(ea, eb, 13), Error);
}

TEST(WassersteinTest, ProjectionIsAnExactTarget) {
  // W1 under truncated cost only sees the depth-D marginals, so comparing
  // with the cylinder projection equals comparing with a fine sample of it.
  const auto mu = MarkovMeasure::bernoulli({0.3, 0.7});
  const auto proj6 = cylinder_distribution(mu, 6);
  const auto proj10 = cylinder_distribution(mu, 10);
  EXPECT_NEAR(wasserstein1(proj6, proj10, 6).value, 0.0, 1e-15);
  double total = 0.0;
  for (const auto& atom : proj10.atoms()) total += atom.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SamplingTest, DeterministicChainAndReproducibility) {
  const MarkovMeasure rot(ShiftSpace::full_shift(3), {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  EXPECT_EQ(sample_generic(rot, 7, 99, Symbol{2}), (Word{2, 3, 1, 2, 3, 1, 2}));
  const auto bern = MarkovMeasure::bernoulli({0.5, 0.5});
  EXPECT_EQ(sample_generic(bern, 1000, 5), sample_generic(bern, 1000, 5));
  EXPECT_NE(sample_generic(bern, 1000, 5), sample_generic(bern, 1000, 6));
  const auto parry = golden_parry_by_hand();
  EXPECT_TRUE(sofic::is_admissible(sample_generic(parry, 5000, 3), parry.space()));
}

TEST(SamplingTest, BernoulliEmpiricalConvergesInW1) {
  const auto bern = MarkovMeasure::bernoulli({0.5, 0.5});
  const auto& space = bern.space();
  const int depth = 8;
  int close = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Word x = sample_generic(bern, (1 << 14) + depth, seed);
    const Word ref = sample_generic(bern, (1 << 16) + depth, Rng::mix(seed, 1000));
    const auto ex = empirical_measure(x, 1 << 14, depth, space);
    const auto er = empirical_measure(ref, 1 << 16, depth, space);
    close += wasserstein1(ex, er, depth).value < 0.05;
  }
  EXPECT_GE(close, 95);
}

TEST(MixtureProxyTest, DegenerateAndDeterministic) {
  const auto a = MarkovMeasure::bernoulli({0.5, 0.5});
  const auto b = MarkovMeasure::bernoulli({0.2, 0.8});
  const MarkovMixture first_only({a, b}, {1.0, 0.0});
  const auto p = mixture_distance_proxy(first_only, 8, 7, {.samples = 64, .depth = 8});
  std::vector<FinSuppMeasure::Atom> atoms;
  const std::uint64_t stream = Rng::mix(7, 0);
  for (std::uint64_t s = 0; s < 64; ++s) {
    atoms.push_back({encode(sample_generic(a, 8, Rng::mix(stream, s)), 2), 1.0 / 64});
  }
  const FinSuppMeasure expected(2, 2.0, 8, atoms);
  ASSERT_EQ(p.size(), expected.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p.atoms()[i].code, expected.atoms()[i].code);
    EXPECT_DOUBLE_EQ(p.atoms()[i].weight, expected.atoms()[i].weight);
  }
  const auto ones = MarkovMeasure::bernoulli({1.0, 0.0});
  const auto twos = MarkovMeasure::bernoulli({0.0, 1.0});
  const MarkovMixture split({ones, twos}, {0.25, 0.75});
  const auto q = mixture_distance_proxy(split, 16, 1, {.samples = 4096, .depth = 8});
  ASSERT_EQ(q.size(), 2u);
  EXPECT_DOUBLE_EQ(q.atoms()[0].weight, 0.25);
  EXPECT_DOUBLE_EQ(q.atoms()[1].weight, 0.75);
}

TEST(MixtureProxyTest, IdenticalComponentsLookLikeOne) {
  const auto a = MarkovMeasure::bernoulli({0.4, 0.6});
  const MarkovMixture twin({a, a}, {0.5, 0.5});
  const MarkovMixture single({a}, {1.0});
  int close = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = mixture_distance_proxy(twin, 1 << 14, seed, {.samples = 4096, .depth = 8});
    const auto q = mixture_distance_proxy(single, 1 << 14, seed + 500, {.samples = 4096, .depth = 8});
    close += wasserstein1(p, q, 8).value < 0.05;
  }
  EXPECT_GE(close, 95);
}

}  // namespace
}  // namespace elab::measures
