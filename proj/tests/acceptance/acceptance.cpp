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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
// Usage: acceptance [criterion ...]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "elab/carath.hpp"
#include "elab/construct.hpp"
#include "elab/error.hpp"
#include "elab/measures.hpp"
#include "elab/pointwise.hpp"
#include "elab/potential.hpp"
#include "elab/rng.hpp"
#include "elab/sofic.hpp"

namespace {

using namespace elab;
using carath::CStructure;
using measures::FinSuppMeasure;
using measures::MarkovMeasure;
using sofic::ShiftSpace;

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  // Records one measured check; returns ok.
  bool check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    return ok;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string counts_text(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : "/") + std::to_string(x);
  return s;
}

// ---- 1

void entropy_oracles(Report& r) {
  for (int m : {2, 3, 5}) {
    const double h = sofic::topological_entropy(ShiftSpace::full_shift(m));
    const double err = std::abs(h - std::log(static_cast<double>(m)));
    r.check(err <= 1e-12, "full shift m=" + std::to_string(m) + fmt(": |h - log m| = %.2e <= 1e-12", err));
  }
  const double err = std::abs(sofic::topological_entropy(ShiftSpace::golden_mean()) - std::log(kGolden));
  r.check(err <= 1e-9, fmt("golden mean: |h - log phi| = %.2e <= 1e-9", err));
}

// ---- 2

void pressure_consistency(Report& r) {
  const std::vector<std::pair<std::string, ShiftSpace>> fixtures{
      {"full m=2", ShiftSpace::full_shift(2)},
      {"full m=3", ShiftSpace::full_shift(3)},
      {"golden", ShiftSpace::golden_mean()}};
  for (const auto& [name, space] : fixtures) {
    const double h = sofic::topological_entropy(space);
    const auto zero = LocalPotential::constant(space.alphabet_size(), 0.0);
    for (int n : {8, 16, 24}) {
      const double gap = std::abs(carath::pressure_partition(space, zero, n) - h);
      r.check(gap <= 2.0 / n, name + " n=" + std::to_string(n) +
                                  fmt(": |P_n(0) - h| = %.3e <= 2/n = %.4f", gap, 2.0 / n));
    }
  }
  for (const std::vector<double>& p :
       {std::vector<double>{0.25, 0.75}, std::vector<double>{0.2, 0.3, 0.5}}) {
    std::vector<double> logs;
    for (double x : p) logs.push_back(std::log(x));
    const auto m = static_cast<int>(p.size());
    const double value =
        carath::pressure_exact(ShiftSpace::full_shift(m), LocalPotential::first_symbol(logs));
    r.check(std::abs(value) <= 1e-9, "Bernoulli m=" + std::to_string(m) +
                                         fmt(": |P(log p)| = %.2e <= 1e-9", std::abs(value)));
  }
}

// ---- 3

void bowen_roots(Report& r) {
  const std::vector<std::pair<std::string, ShiftSpace>> fixtures{
      {"full m=2", ShiftSpace::full_shift(2)},
      {"full m=3", ShiftSpace::full_shift(3)},
      {"golden", ShiftSpace::golden_mean()}};
  for (const auto& [name, space] : fixtures) {
    const int m = space.alphabet_size();
    const double h = sofic::topological_entropy(space);
    const double one = carath::bowen_dimension(space, LocalPotential::constant(m, 1.0));
    r.check(std::abs(one - h) <= 1e-9, name + fmt(": |s(u=1) - h| = %.2e <= 1e-9", std::abs(one - h)));
    for (double beta : {2.0, 3.0}) {
      const double s = carath::bowen_dimension(space, LocalPotential::constant(m, std::log(beta)));
      const double err = std::abs(s - h / std::log(beta));
      r.check(err <= 1e-9, name + fmt(": beta=%g |s(u=log beta) - h/log beta| = %.2e <= 1e-9", beta, err));
    }
  }
}

// ---- 4

void outer_measure_behavior(Report& r) {
  const auto s = CStructure::entropy(ShiftSpace::full_shift(2));
  const std::vector<Word> x{Word{}};
  for (double t : {0.3, 0.5}) {
    double worst = 0.0;
    for (int d = 4; d <= 12; ++d) {
      worst = std::max(worst, std::abs(carath::outer_measure_M(s, x, t, d) - 2.0 * std::exp(-t)));
    }
    r.check(worst <= 1e-12, fmt("t=%.1f: max_D |M - 2e^-t| = %.2e <= 1e-12", t, worst));
  }
  double worst = 0.0;
  double prev = carath::outer_measure_M(s, x, 1.0, 4);
  for (int d = 5; d <= 12; ++d) {
    const double cur = carath::outer_measure_M(s, x, 1.0, d);
    worst = std::max(worst, std::abs(cur / prev - 2.0 / std::exp(1.0)));
    prev = cur;
  }
  r.check(worst <= 1e-9, fmt("t=1.0: max_D |M(D+1)/M(D) - 2/e| = %.2e <= 1e-9", worst));

  Rng rng(4, 0);
  const std::vector<CStructure> kinds{s, CStructure::hausdorff(ShiftSpace::full_shift(2, 3.0)),
                                      CStructure::entropy(ShiftSpace::golden_mean())};
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    const auto& st = kinds[static_cast<std::size_t>(i) % kinds.size()];
    const double t = 1.5 * rng.uniform();
    const int m_blk = 1 + static_cast<int>(rng.below(3));
    const int cap = m_blk * (1 + static_cast<int>(rng.below(3)));
    std::vector<Word> target{Word{}};
    if (rng.below(2) == 1) target = {Word{1}};
    const double mm = carath::outer_measure_M(st, target, t, cap);
    const double nn = carath::outer_measure_N(st, target, t, m_blk, cap);
    if (mm > nn * (1 + 1e-12)) ++bad;
  }
  r.check(bad == 0, "M <= N on 50 random (structure, t, m_blk, depth_cap, target) cases: " +
                        std::to_string(bad) + " violations");
}

// ---- 5

void condition_checks(Report& r) {
  const auto full = ShiftSpace::full_shift(2);
  const auto entropy = CStructure::entropy(full);
  const auto rep8 = carath::check_conditions(entropy, 8, {0.3, 0.6});
  r.check(std::abs(rep8.q3_estimate - 1.0) <= 1e-12,
          fmt("entropy depth 8: |Q3 - 1| = %.2e <= 1e-12", std::abs(rep8.q3_estimate - 1.0)));
  Rng rng(5, 0);
  std::vector<double> phi(4);
  for (double& v : phi) v = rng.uniform() - 0.5;
  const std::vector<std::pair<std::string, CStructure>> kinds{
      {"entropy", entropy},
      {"hausdorff", CStructure::hausdorff(ShiftSpace::full_shift(2, 3.0))},
      {"pressure", CStructure::pressure(full, LocalPotential(2, 2, phi))},
      {"appendix", CStructure::appendix(ShiftSpace::golden_mean(), LocalPotential::first_symbol({0.7, 1.3}))}};
  for (const auto& [name, st] : kinds) {
    const auto rep = carath::check_conditions(st, 10, {0.3, 0.6});
    r.check(rep.c4, name + ": C4 exhaustive to depth " + std::to_string(rep.depth));
  }
}

// ---- 6

FinSuppMeasure random_measure(Rng& rng, int depth) {
  const std::size_t k = 1 + rng.below(6);
  std::vector<FinSuppMeasure::Atom> atoms;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 0.05 + rng.uniform();
    atoms.push_back({rng.below(std::uint64_t{1} << depth), w});
    total += w;
  }
  for (auto& a : atoms) a.weight /= total;
  return FinSuppMeasure(2, 2.0, depth, std::move(atoms));
}

void transport_layer(Report& r) {
  const int depth = 8;
  const double tb = ShiftSpace::full_shift(2).tail_bound(depth);
  Rng rng(6, 0);
  int identity = 0, symmetry = 0, triangle = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_measure(rng, depth);
    const auto b = random_measure(rng, depth);
    const auto c = random_measure(rng, depth);
    const double ab = measures::wasserstein1(a, b, depth).value;
    const double ba = measures::wasserstein1(b, a, depth).value;
    const double bc = measures::wasserstein1(b, c, depth).value;
    const double ac = measures::wasserstein1(a, c, depth).value;
    if (std::abs(measures::wasserstein1(a, a, depth).value) > 3 * tb) ++identity;
    if (std::abs(ab - ba) > 3 * tb) ++symmetry;
    if (ac > ab + bc + 3 * tb) ++triangle;
  }
  r.check(identity + symmetry + triangle == 0,
          "1000 triples: identity/symmetry/triangle violations " + std::to_string(identity) + "/" +
              std::to_string(symmetry) + "/" + std::to_string(triangle) + fmt(" (3 tb = %.2e)", 3 * tb));

  int bad = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  const std::vector<ShiftSpace> spaces{ShiftSpace::full_shift(2), ShiftSpace::full_shift(2, 3.0),
                                       ShiftSpace::golden_mean()};
  for (int i = 0; i < 500; ++i) {
    const auto& space = spaces[static_cast<std::size_t>(i) % spaces.size()];
    const auto mu = MarkovMeasure::parry(space);
    const std::size_t n = 20 + rng.below(2000);
    const std::size_t n1 = 1 + rng.below(n);
    const int d = 4 + static_cast<int>(rng.below(5));
    const Word x = measures::sample_generic(mu, n + d, rng.below(1u << 30));
    // z then x, with z ending where x may follow.
    Word zx = measures::sample_generic(mu, n1, rng.below(1u << 30));
    const Word bridge = sofic::connector(std::span<const Symbol>(zx).last(1),
                                         std::span<const Symbol>(x).first(1), space);
    zx.insert(zx.end(), bridge.begin(), bridge.end());
    const std::size_t prefix = zx.size();
    zx.insert(zx.end(), x.begin(), x.end());
    const auto ex = measures::empirical_measure(x, n, d, space);
    const auto ezx = measures::empirical_measure(zx, n + prefix, d, space);
    const double w = measures::wasserstein1(ex, ezx, d).value;
    const double bound = 2.0 * static_cast<double>(prefix) / static_cast<double>(n) + 2 * space.tail_bound(d);
    worst_margin = std::min(worst_margin, bound - w);
    if (w > bound) ++bad;
  }
  r.check(bad == 0, "500 cases W1(d_x^n, d_zx^(n+n1)) <= 2 n1/n + 2 tb: " + std::to_string(bad) +
                        fmt(" violations, smallest margin %.3e", worst_margin));
}

// ---- 7

struct SlopeRun {
  std::vector<int> lower;
  std::vector<int> upper;
  pointwise::Fit lower_fit;
  pointwise::Fit upper_fit;
};

SlopeRun slopes(const Word& w, std::size_t n_min, std::size_t n_max, std::size_t count, int depth,
                const ShiftSpace& space, const std::vector<double>& eps, double tail) {
  const auto cloud = pointwise::build_cloud(w, n_min, n_max, count, depth, space);
  const auto rep = pointwise::emergence_estimate(cloud, eps, tail, 1);
  return {rep.lower, rep.upper, rep.lower_fit, rep.upper_fit};
}

void emergence_exponents(Report& r) {
  const std::vector<double> four{0.2, 0.1, 0.05, 0.025};
  {
    const auto mu = MarkovMeasure::bernoulli({0.5, 0.5});
    const std::size_t n_max = std::size_t{1} << 14;
    const int depth = 6;
    const Word w = measures::sample_generic(mu, n_max + depth, 71);
    const auto s = slopes(w, 16, n_max, 128, depth, mu.space(), four, 0.5);
    r.check(s.upper_fit.slope <= 0.3,
            "(a) generic Bernoulli(1/2), n_max 2^14: upper counts " + counts_text(s.upper) +
                fmt(", slope %.3f <= 0.3", s.upper_fit.slope));
  }
  {
    const auto a = MarkovMeasure::bernoulli({0.1, 0.9});
    const auto b = MarkovMeasure::bernoulli({0.9, 0.1});
    const int depth = 6;
    const std::size_t length = std::size_t{1} << 22;
    const Word w = construct::oscillating_orbit(a, b, 64, 8.0, length + depth, 72);
    const auto s = slopes(w, 1024, length, 400, depth, a.space(), four, 0.5);
    r.check(s.upper_fit.slope >= 0.7 && s.upper_fit.slope <= 1.3,
            "(b) two-measure oscillator: upper counts " + counts_text(s.upper) +
                fmt(", slope %.3f in [0.7, 1.3]", s.upper_fit.slope));
  }
  {
    // Four Markov measures at A = C = 0.1, planned through level 3.
    const auto space = ShiftSpace::full_shift(2, 1.5);
    const double p = 0.1;
    const std::vector<MarkovMeasure> ms{MarkovMeasure(space, {{1 - p, p}, {1 - p, p}}),
                                        MarkovMeasure(space, {{p, 1 - p}, {p, 1 - p}}),
                                        MarkovMeasure(space, {{p, 1 - p}, {1 - p, p}}),
                                        MarkovMeasure(space, {{1 - p, p}, {p, 1 - p}})};
    std::vector<double> dims;
    for (const auto& mu : ms) dims.push_back(measures::measure_entropy(mu));
    const auto family = construct::make_family(ms, dims);
    construct::PlanOptions plan;
    plan.max_level = 3;
    plan.eps_tilde = {0.9, 0.9, 0.8, 0.6};
    plan.eps_hat = {0.1, 0.1, 0.1, 0.1};
    plan.net_mesh = {1.0, 2.0, 3.0, 2.0};
    plan.gamma.samples = 50;
    const auto it = construct::plan_itinerary(family, plan);
    const auto orbit = construct::build_orbit(it, family, space, 1);
    std::size_t start3 = 1;
    for (const auto& sp : orbit.spans) {
      if (sp.level == 3) {
        start3 = std::max<std::size_t>(sp.start, 1);
        break;
      }
    }
    const int depth = 6;
    const std::vector<double> three{0.2, 0.1, 0.05};
    const auto s = slopes(orbit.word, start3, orbit.word.size() - depth + 1, 300, depth, space,
                          three, 1.0);
    r.check(s.lower_fit.slope >= 2.0,
            "(c) level-3 orbit (" + std::to_string(orbit.word.size()) + " symbols, J(3) = " +
                std::to_string(it.nets[3].cardinality()) + "): lower counts " +
                counts_text(s.lower) + ", upper " + counts_text(s.upper) +
                fmt(", lower slope %.3f >= 2", s.lower_fit.slope));
  }
}

// ---- 8 and 9

construct::MeasureFamily level_two_family() {
  std::vector<MarkovMeasure> ms{MarkovMeasure::bernoulli({0.5, 0.5}),
                                MarkovMeasure::bernoulli({0.15, 0.85}),
                                MarkovMeasure::bernoulli({0.85, 0.15})};
  std::vector<double> dims;
  for (const auto& mu : ms) dims.push_back(measures::measure_entropy(mu));
  return construct::make_family(ms, dims);
}

construct::Itinerary level_two_plan(const construct::MeasureFamily& family) {
  construct::PlanOptions plan;
  plan.max_level = 2;
  plan.net_mesh = {1.0, 2.0, 1.5};
  plan.gamma.samples = 100;
  return construct::plan_itinerary(family, plan);
}

void saturation(Report& r) {
  const auto family = level_two_family();
  const auto it = level_two_plan(family);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto orbit = construct::build_orbit(it, family, family.measures[0].space(), seed);
    const auto rep = construct::verify_saturation(orbit, it, it.nets[2], family, 0.05, 8);
    double worst = 0.0;
    int unreachable = 0;
    for (const auto& n : rep.nodes) {
      worst = std::max(worst, n.distance);
      unreachable += n.reachable ? 0 : 1;
    }
    r.check(rep.pass, "seed " + std::to_string(seed) + ": " + std::to_string(rep.nodes.size()) +
                          " nodes, " + std::to_string(unreachable) + " unreachable" +
                          fmt(", max distance %.4f <= threshold %.4f", worst, rep.threshold));
  }
}

void lambda_dimension(Report& r) {
  const auto family = level_two_family();
  const auto it = level_two_plan(family);
  const auto orbit = construct::build_orbit(it, family, family.measures[0].space(), 1);
  double min_h = std::numeric_limits<double>::infinity();
  for (const auto& mu : family.measures) min_h = std::min(min_h, measures::measure_entropy(mu));
  const double floor = min_h - it.eps_tilde[2] - 0.05;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sp : orbit.spans) {
    const double v = -construct::log_lambda_measure(orbit, family, sp.end) / static_cast<double>(sp.end);
    worst = std::min(worst, v);
  }
  r.check(worst >= floor, std::to_string(orbit.spans.size()) + " block boundaries: min -log Lambda/n" +
                              fmt(" = %.4f >= %.4f (min h - eps_2 - 0.05)", worst, floor));
}

// ---- 10

// Smallest number of cloud points whose closed eps-balls cover the cloud.
int brute_force_cover(const std::vector<double>& dist, std::size_t n, double eps) {
  int best = static_cast<int>(n);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    if (size >= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c) hit = (mask >> c & 1u) && dist[i * n + c] <= eps;
      ok = hit;
    }
    if (ok) best = size;
  }
  return best;
}

void cover_equivalence(Report& r) {
  Rng rng(10, 0);
  const auto space = ShiftSpace::full_shift(2);
  int bad_exact = 0, bad_sandwich = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const double p = 0.1 + 0.8 * rng.uniform();
    const auto mu = MarkovMeasure::bernoulli({p, 1 - p});
    const int depth = 4;
    const Word w = measures::sample_generic(mu, 400, rng.below(1u << 30));
    std::vector<std::size_t> times;
    for (std::size_t i = 0; i < n; ++i) times.push_back(8 + i * (1 + rng.below(30)) + i);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const auto cloud = pointwise::build_cloud_at(w, times, depth, space);
    const std::size_t k = cloud.times.size();
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    const auto dist = pointwise::distance_matrix(cloud, idx);
    double hi = 0.0;
    for (double d : dist) hi = std::max(hi, d);
    const double eps = hi * (0.05 + 0.6 * rng.uniform());
    const auto b = pointwise::covering_number_bounds(dist, k, eps);
    const int oracle = brute_force_cover(dist, k, eps);
    if (!b.exact || *b.exact != oracle || b.lower != oracle || b.upper != oracle) ++bad_exact;
    if (b.greedy_lower > oracle || b.greedy_upper < oracle) ++bad_sandwich;
  }
  r.check(bad_exact + bad_sandwich == 0,
          "200 clouds of <= 12 snapshots: exhaustive != brute force in " +
              std::to_string(bad_exact) + ", outside greedy interval in " +
              std::to_string(bad_sandwich));

  // Every subset of the 30 cylinders of length 1..4 on the full 2-shift, in
  // Gray-code order, with integer counts of chosen cylinders per length.
  constexpr int kDepth = 4;
  struct Node {
    int len;
    std::uint16_t leaves;
    Word word;
  };
  std::vector<Node> nodes;
  for (int len = kDepth; len >= 1; --len) {  // deepest first: they toggle most often
    for (std::uint32_t code = 0; code < (1u << len); ++code) {
      Word wd(static_cast<std::size_t>(len));
      for (int i = 0; i < len; ++i) wd[static_cast<std::size_t>(i)] = static_cast<Symbol>((code >> (len - 1 - i) & 1u) + 1);
      const int span = 1 << (kDepth - len);
      const auto leaves = static_cast<std::uint16_t>(((1u << span) - 1) << (code * span));
      nodes.push_back({len, leaves, wd});
    }
  }
  struct Target {
    std::string name;
    std::vector<Word> words;
    std::uint16_t leaves;
    int depth;
  };
  auto leaf_mask = [&](const std::vector<Word>& words) {
    std::uint16_t m = 0;
    for (const Word& wd : words) {
      if (wd.empty()) return static_cast<std::uint16_t>(0xFFFF);
      for (const Node& nd : nodes) {
        if (nd.word == wd) m |= nd.leaves;
      }
    }
    return m;
  };
  std::vector<Target> targets{{"X", {Word{}}, 0, 0},
                              {"C(1)", {Word{1}}, 0, 1},
                              {"C(1)+C(22)", {Word{1}, Word{2, 2}}, 0, 2},
                              {"C(2)+C(121)", {Word{1, 2, 1}, Word{2}}, 0, 3}};
  for (auto& t : targets) t.leaves = leaf_mask(t.words);
  const double ts[2] = {0.3, 1.0};
  double weight[2][kDepth + 1];
  for (int k = 0; k < 2; ++k) {
    for (int len = 1; len <= kDepth; ++len) weight[k][len] = std::exp(-ts[k] * len);
  }
  // best[target][cap][t]
  std::vector<double> best(targets.size() * (kDepth + 1) * 2, std::numeric_limits<double>::infinity());
  std::uint8_t count[16] = {};
  std::uint16_t covered = 0;
  int per_len[kDepth + 1] = {};
  const std::uint64_t total = std::uint64_t{1} << nodes.size();
  for (std::uint64_t i = 1; i < total; ++i) {
    const int bit = std::countr_zero(i);
    const Node& nd = nodes[static_cast<std::size_t>(bit)];
    const bool adding = ((i ^ (i >> 1)) >> bit & 1u) != 0;
    per_len[nd.len] += adding ? 1 : -1;
    for (int leaf = 0; leaf < 16; ++leaf) {
      if (!(nd.leaves >> leaf & 1u)) continue;
      if (adding) {
        if (count[leaf]++ == 0) covered = static_cast<std::uint16_t>(covered | (1u << leaf));
      } else {
        if (--count[leaf] == 0) covered = static_cast<std::uint16_t>(covered & ~(1u << leaf));
      }
    }
    int deepest = kDepth;
    while (deepest > 0 && per_len[deepest] == 0) --deepest;
    double value[2] = {0.0, 0.0};
    bool computed = false;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
      if ((covered & targets[ti].leaves) != targets[ti].leaves) continue;
      if (!computed) {
        for (int k = 0; k < 2; ++k) {
          for (int len = 1; len <= kDepth; ++len) value[k] += per_len[len] * weight[k][len];
        }
        computed = true;
      }
      for (int cap = std::max({deepest, targets[ti].depth, 1}); cap <= kDepth; ++cap) {
        for (int k = 0; k < 2; ++k) {
          double& slot = best[(ti * (kDepth + 1) + static_cast<std::size_t>(cap)) * 2 + static_cast<std::size_t>(k)];
          slot = std::min(slot, value[k]);
        }
      }
    }
  }
  const auto s = CStructure::entropy(space);
  double worst = 0.0;
  int compared = 0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    for (int cap = std::max(targets[ti].depth, 1); cap <= kDepth; ++cap) {
      for (int k = 0; k < 2; ++k) {
        const double oracle = best[(ti * (kDepth + 1) + static_cast<std::size_t>(cap)) * 2 + static_cast<std::size_t>(k)];
        const double dp = carath::outer_measure_M(s, targets[ti].words, ts[k], cap);
        worst = std::max(worst, std::abs(dp - oracle) / std::max(1.0, oracle));
        ++compared;
      }
    }
  }
  r.check(worst <= 1e-12, "outer_measure_M vs all 2^30 covers (" + std::to_string(compared) +
                              " target/cap/t cases, t in {0.3, 1.0}): max rel. gap " +
                              fmt("%.2e <= 1e-12", worst));
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Report&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "entropy oracles", 1.0, entropy_oracles},
      {2, "pressure consistency", 10.0, pressure_consistency},
      {3, "Bowen roots", 5.0, bowen_roots},
      {4, "outer-measure behavior", 30.0, outer_measure_behavior},
      {5, "condition checks", 30.0, condition_checks},
      {6, "transport layer", 60.0, transport_layer},
      {7, "emergence exponents", 600.0, emergence_exponents},
      {8, "saturation", 300.0, saturation},
      {9, "Lambda-measure dimension probe", 60.0, lambda_dimension},
      {10, "exact-oracle equivalences", 300.0, cover_equivalence},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Report r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(r);
    } catch (const Error& e) {
      r.check(false, "error in " + e.module() + "/" + e.operation() + ": " + e.detail());
    } catch (const std::exception& e) {
      r.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.check(secs < c.budget_s, fmt("runtime %.2f s < %.0f s", secs, c.budget_s));
    std::printf("[%s] criterion %d: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& line : r.lines) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, selected.empty() ? all.size() : selected.size());
  return failed == 0 ? 0 : 1;
}
