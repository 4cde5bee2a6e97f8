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

#include "elab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "elab/error.hpp"
#include "elab/parallel.hpp"
#include "elab/pointwise.hpp"
#include "elab/rng.hpp"

namespace elab::construct {
namespace {

constexpr const char* kModule = "constructor";

using measures::FinSuppMeasure;

// Every admissible word of length 1..depth, shortest first.
std::vector<Word> admissible_words(const ShiftSpace& space, int depth) {
  std::vector<Word> out, layer;
  for (int s = 1; s <= space.alphabet_size(); ++s) layer.push_back({static_cast<Symbol>(s)});
  for (int len = 1; len <= depth; ++len) {
    out.insert(out.end(), layer.begin(), layer.end());
    if (len == depth) break;
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (int s = 1; s <= space.alphabet_size(); ++s) {
        if (!space.allowed(w.back(), static_cast<Symbol>(s))) continue;
        Word v = w;
        v.push_back(static_cast<Symbol>(s));
        next.push_back(std::move(v));
      }
    }
    layer.swap(next);
  }
  return out;
}

void compositions(int parts, int total, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    current.push_back(first);
    compositions(parts - 1, total - first, current, out);
    current.pop_back();
  }
}

std::vector<int> largest_remainder(const std::vector<double>& t, int q) {
  const std::size_t k = t.size();
  std::vector<int> out(k);
  std::vector<std::pair<double, std::size_t>> frac(k);
  int used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = t[i] * q;
    out[i] = static_cast<int>(std::floor(x));
    used += out[i];
    frac[i] = {x - std::floor(x), i};
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < q; ++r, ++used) ++out[frac[r % k].second];
  return out;
}

// The Gamma threshold of the block following (group, ell) in the order.
std::size_t successor_gamma(const Itinerary& it, int level, std::size_t j, int ell) {
  if (ell < level) return it.gamma_n[level][ell + 1];
  if (j + 1 < it.nets[level].cardinality()) return it.gamma_n[level][0];
  if (level < it.max_level) return it.gamma_n[level + 1][0];
  // Beyond the built range: the largest threshold of the last level stands
  // in for the unknown next one.
  const auto& last = it.gamma_n[it.max_level];
  return *std::max_element(last.begin(), last.end());
}

struct GroupContext {
  int level;
  std::size_t j;
  double prefix;  // total length of earlier groups
  const std::vector<double>* t;
  const std::vector<std::size_t>* entry;
  std::vector<std::size_t> next_gamma;
  double eps;
};

// Names of the violated constraints for the candidate lengths (empty when
// feasible); stops at the first one unless `all` is set.
std::vector<std::string> violations(const GroupContext& g, const std::vector<std::size_t>& n,
                                    bool all = false) {
  std::vector<std::string> out;
  auto fail = [&](const char* name) {
    out.emplace_back(name);
    return !all;
  };
  double s = 0.0;
  for (std::size_t v : n) s += static_cast<double>(v);
  for (std::size_t l = 0; l < n.size(); ++l) {
    if (n[l] < std::max<std::size_t>((*g.entry)[l], 1)) {
      if (fail("entry")) return out;
      break;
    }
  }
  double running = g.prefix;
  for (std::size_t l = 0; l < n.size(); ++l) {
    running += static_cast<double>(n[l]);
    if (static_cast<double>(g.next_gamma[l]) / running > g.eps) {
      if (fail("eq:0729b1")) return out;
      break;
    }
  }
  if (2.0 * g.prefix / (g.prefix + s) + 2.0 * (g.level + 1) / s >= g.eps) {
    if (fail("eq:0725a")) return out;
  }
  for (std::size_t l = 0; l < n.size(); ++l) {
    if (std::abs(static_cast<double>(n[l]) / s - (*g.t)[l]) > g.eps / (g.level + 1)) {
      fail("eq:0725b");
      break;
    }
  }
  return out;
}

bool feasible(const GroupContext& g, const std::vector<std::size_t>& n) {
  return violations(g, n).empty();
}

std::vector<std::size_t> scaled_lengths(const GroupContext& g, double scale) {
  std::vector<std::size_t> n(g.t->size());
  for (std::size_t l = 0; l < n.size(); ++l) {
    const double proportional = std::ceil(scale * (*g.t)[l]);
    n[l] = std::max<std::size_t>({(*g.entry)[l], static_cast<std::size_t>(proportional), 1});
  }
  return n;
}

std::vector<std::size_t> search_group(const GroupContext& g, const ScheduleOptions& options) {
  double hi = 1.0;
  while (!feasible(g, scaled_lengths(g, hi))) {
    hi *= 2.0;
    if (hi > static_cast<double>(options.max_group_length)) {
      const auto bad =
          violations(g, scaled_lengths(g, static_cast<double>(options.max_group_length)), true);
      std::string names;
      for (const auto& b : bad) names += (names.empty() ? "" : ", ") + b;
      throw Error(ErrorKind::kSchedule, kModule, "block_schedule",
                  "inequality " + (names.empty() ? std::string("eq:0725b") : names) +
                      " cannot be met for level " + std::to_string(g.level) + " node " +
                      std::to_string(g.j) + " within group length cap " +
                      std::to_string(options.max_group_length));
    }
  }
  double lo = hi / 2.0;
  while (hi - lo > 1.0) {
    const double mid = std::floor((lo + hi) / 2.0);
    if (feasible(g, scaled_lengths(g, mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  std::vector<std::size_t> n = scaled_lengths(g, hi);

  // Coordinate descent: each coordinate's feasible values form an interval
  // containing the current value, so bisection finds its lower end.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t l = 0; l < n.size(); ++l) {
      std::size_t low = std::max<std::size_t>((*g.entry)[l], 1);
      std::size_t high = n[l];
      while (low < high) {
        const std::size_t mid = low + (high - low) / 2;
        std::vector<std::size_t> trial = n;
        trial[l] = mid;
        if (feasible(g, trial)) {
          high = mid;
        } else {
          low = mid + 1;
        }
      }
      if (high != n[l]) {
        n[l] = high;
        changed = true;
      }
    }
  }
  return n;
}

Word bridge_to_self(std::span<const Symbol> y, const ShiftSpace& space) {
  return sofic::connector(y.last(1), y.first(1), space, 1, true);
}

// Periodic continuation after y: omega y omega y ... (at least `length`).
Word periodic_tail(std::span<const Symbol> y, const Word& omega, std::size_t length) {
  Word tail;
  tail.reserve(length + y.size() + omega.size());
  while (tail.size() < length) {
    tail.insert(tail.end(), omega.begin(), omega.end());
    tail.insert(tail.end(), y.begin(), y.end());
  }
  return tail;
}

bool passes(const MarkovMeasure& mu, std::span<const Symbol> y, double eps,
            const FinSuppMeasure& target, const std::optional<DimFilter>& filter,
            const TypicalOptions& options) {
  const ShiftSpace& space = mu.space();
  const Word omega = bridge_to_self(y, space);
  const Word tail = periodic_tail(y, omega, static_cast<std::size_t>(options.depth));
  const std::size_t n = y.size();
  auto close_at = [&](std::size_t count) {
    const FinSuppMeasure e = measures::window_measure(y, tail, count, options.depth, space);
    return measures::wasserstein1(e, target, options.depth).value < eps;
  };
  if (!close_at(n)) return false;
  for (std::size_t extra : options.extra_checks) {
    if (extra >= 1 && extra < n && !close_at(extra)) return false;
  }
  if (filter) {
    Word period(y.begin(), y.end());
    period.insert(period.end(), omega.begin(), omega.end());
    const double sum = filter->u.periodic_sum(period, n);
    if (-measures::log_cylinder_probability(mu, y) / sum < filter->threshold) return false;
  }
  return true;
}

}  // namespace

MeasureFamily make_family(std::vector<MarkovMeasure> measures, std::vector<double> dims) {
  if (measures.empty() || measures.size() != dims.size()) {
    throw Error(ErrorKind::kInvariant, kModule, "MeasureFamily",
                "need one dimension per measure and at least one measure");
  }
  const ShiftSpace& space = measures.front().space();
  for (const auto& mu : measures) {
    if (!(mu.space() == space)) {
      throw Error(ErrorKind::kInvariant, kModule, "MeasureFamily",
                  "measures live on different shift spaces");
    }
  }
  const auto words = admissible_words(space, 4);
  for (std::size_t a = 0; a < measures.size(); ++a) {
    for (std::size_t b = a + 1; b < measures.size(); ++b) {
      const bool distinct = std::any_of(words.begin(), words.end(), [&](const Word& w) {
        return std::abs(measures::cylinder_probability(measures[a], w) -
                        measures::cylinder_probability(measures[b], w)) > 1e-9;
      });
      if (!distinct) {
        throw Error(ErrorKind::kInvariant, kModule, "MeasureFamily",
                    "measures " + std::to_string(a) + " and " + std::to_string(b) +
                        " agree on all cylinders of length <= 4");
      }
    }
  }
  return MeasureFamily{std::move(measures), std::move(dims)};
}

int cylinder_rank(const MeasureFamily& family, int depth) {
  const auto words = admissible_words(family.measures.front().space(), depth);
  const std::size_t rows = family.measures.size(), cols = words.size();
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      a[r][c] = measures::cylinder_probability(family.measures[r], words[c]);
    }
  }
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows); ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank; r < rows; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    }
    if (std::abs(a[pivot][c]) < 1e-9) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

SimplexNet simplex_net(int level, double mesh, std::size_t cap) {
  if (level < 0 || !(mesh > 0.0)) {
    throw Error(ErrorKind::kInput, kModule, "simplex_net", "need level >= 0 and mesh > 0");
  }
  SimplexNet net;
  net.level = level;
  net.mesh = mesh;
  const double q = std::ceil((level + 1) / mesh - 1e-12);
  if (q > 1e6) {
    throw Error(ErrorKind::kSize, kModule, "simplex_net", "mesh too fine");
  }
  net.denominator = static_cast<int>(std::max(q, 1.0));
  // J(L) = binomial(q + L, L).
  double count = 1.0;
  for (int i = 1; i <= level; ++i) count = count * (net.denominator + i) / i;
  if (count > static_cast<double>(cap)) {
    throw Error(ErrorKind::kSize, kModule, "simplex_net",
                "net cardinality J(" + std::to_string(level) + ") = " +
                    std::to_string(static_cast<long long>(std::llround(count))) +
                    " exceeds cap " + std::to_string(cap));
  }
  std::vector<std::vector<int>> numerators;
  std::vector<int> current;
  compositions(level + 1, net.denominator, current, numerators);
  for (const auto& c : numerators) {
    std::vector<double> t(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) t[i] = static_cast<double>(c[i]) / net.denominator;
    net.nodes.push_back(std::move(t));
  }
  return net;
}

double rounding_distance(const SimplexNet& net, const std::vector<double>& t) {
  const std::vector<int> r = largest_remainder(t, net.denominator);
  double d = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    d += std::abs(t[i] - static_cast<double>(r[i]) / net.denominator);
  }
  return d;
}

std::size_t Itinerary::block_total() const {
  std::size_t total = 0;
  for (const Block& b : blocks) total += b.length;
  return total;
}

double default_eps_hat(int level, std::size_t net_size) {
  return std::pow(2.0, -level) /
         std::max(1.0, static_cast<double>(level) * static_cast<double>(net_size));
}

double default_eps_tilde(int level) { return 1.0 / (level + 2); }

Itinerary block_schedule(const MeasureFamily& family, int max_level,
                         std::vector<double> eps_tilde, std::vector<double> eps_hat,
                         std::vector<std::vector<std::size_t>> gamma_n,
                         std::vector<SimplexNet> nets, const ScheduleOptions& options) {
  if (max_level < 0 || family.measures.size() < static_cast<std::size_t>(max_level) + 1) {
    throw Error(ErrorKind::kInput, kModule, "block_schedule",
                "family must hold at least max_level + 1 measures");
  }
  const auto levels = static_cast<std::size_t>(max_level) + 1;
  if (eps_tilde.size() < levels || eps_hat.size() < levels || gamma_n.size() < levels ||
      nets.size() < levels) {
    throw Error(ErrorKind::kInput, kModule, "block_schedule",
                "schedules, Gamma thresholds and nets must cover levels 0.." +
                    std::to_string(max_level));
  }
  Itinerary it;
  it.first_level = max_level == 0 ? 0 : 1;
  it.max_level = max_level;
  for (int level = it.first_level; level <= max_level; ++level) {
    if (!(eps_tilde[level] > 0.0) || !(eps_hat[level] > 0.0)) {
      throw Error(ErrorKind::kInput, kModule, "block_schedule", "schedules must be positive");
    }
    if (eps_hat[level] >= 1.0) {
      throw Error(ErrorKind::kSchedule, kModule, "block_schedule",
                  "inequality eq:0729a1 fails: eps_hat at level " + std::to_string(level) +
                      " is >= 1");
    }
    if (gamma_n[level].size() != static_cast<std::size_t>(level) + 1 ||
        nets[level].level != level || nets[level].nodes.empty()) {
      throw Error(ErrorKind::kInput, kModule, "block_schedule",
                  "Gamma thresholds or net inconsistent at level " + std::to_string(level));
    }
  }
  it.eps_tilde = std::move(eps_tilde);
  it.eps_hat = std::move(eps_hat);
  it.gamma_n = std::move(gamma_n);
  it.nets = std::move(nets);

  double prefix = 0.0;
  for (int level = it.first_level; level <= max_level; ++level) {
    const SimplexNet& net = it.nets[level];
    for (std::size_t j = 0; j < net.cardinality(); ++j) {
      GroupContext g{level, j, prefix, &net.nodes[j], &it.gamma_n[level], {}, it.eps_tilde[level]};
      for (int l = 0; l <= level; ++l) g.next_gamma.push_back(successor_gamma(it, level, j, l));
      const std::vector<std::size_t> n = search_group(g, options);
      for (int l = 0; l <= level; ++l) {
        it.blocks.push_back({level, static_cast<int>(j), l, n[l]});
        prefix += static_cast<double>(n[l]);
      }
    }
  }
  return it;
}

std::vector<Violation> check_itinerary(const Itinerary& it) {
  std::vector<Violation> out;
  constexpr auto kGlobal = std::numeric_limits<std::size_t>::max();
  double log_product = 0.0;
  for (int L = it.first_level; L <= it.max_level; ++L) {
    log_product += L * static_cast<double>(it.nets[L].cardinality()) * std::log1p(-it.eps_hat[L]);
  }
  if (!std::isfinite(log_product)) out.push_back({"eq:0729a1", kGlobal, -1, log_product, 0.0});

  // Regroup the flat block list into (level, j) groups.
  struct Group {
    int level;
    int j;
    std::vector<std::size_t> n;
    std::vector<int> ells;
  };
  std::vector<Group> groups;
  for (const Block& b : it.blocks) {
    if (groups.empty() || groups.back().level != b.level || groups.back().j != b.j) {
      groups.push_back({b.level, b.j, {}, {}});
    }
    groups.back().n.push_back(b.length);
    groups.back().ells.push_back(b.ell);
  }
  // Threshold of the block that follows block k in the flat order.
  auto gamma_after = [&](std::size_t k) -> double {
    if (k + 1 < it.blocks.size()) {
      const Block& nb = it.blocks[k + 1];
      return static_cast<double>(it.gamma_n[nb.level][nb.ell]);
    }
    std::size_t worst = 0;
    for (std::size_t v : it.gamma_n[it.max_level]) worst = std::max(worst, v);
    return static_cast<double>(worst);
  };

  double before = 0.0;
  std::size_t flat = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    const int L = g.level;
    const double eps = it.eps_tilde[L];
    const auto& t = it.nets[L].nodes[g.j];
    double s = 0.0;
    for (std::size_t v : g.n) s += static_cast<double>(v);
    double cumulative = before;
    for (std::size_t l = 0; l < g.n.size(); ++l, ++flat) {
      if (g.n[l] < 1) out.push_back({"positive", gi, g.ells[l], 0.0, 1.0});
      if (g.n[l] < it.gamma_n[L][g.ells[l]]) {
        out.push_back({"entry", gi, g.ells[l], static_cast<double>(g.n[l]),
                       static_cast<double>(it.gamma_n[L][g.ells[l]])});
      }
      cumulative += static_cast<double>(g.n[l]);
      const double lhs = gamma_after(flat) / cumulative;
      if (lhs > eps) out.push_back({"eq:0729b1", gi, g.ells[l], lhs, eps});
    }
    const double growth = 2.0 * before / (before + s) + 2.0 * (L + 1) / s;
    if (!(growth < eps)) out.push_back({"eq:0725a", gi, -1, growth, eps});
    double sup = 0.0;
    for (std::size_t l = 0; l < g.n.size(); ++l) {
      sup = std::max(sup, std::abs(static_cast<double>(g.n[l]) / s - t[g.ells[l]]));
    }
    if (sup > eps / (L + 1)) out.push_back({"eq:0725b", gi, -1, sup, eps / (L + 1)});
    before += s;
  }
  return out;
}

Word typical_word(const MarkovMeasure& mu, std::size_t n, double eps, std::uint64_t seed,
                  const std::optional<DimFilter>& filter, const TypicalOptions& options) {
  if (n < 1 || !(eps > 0.0)) {
    throw Error(ErrorKind::kInput, kModule, "typical_word", "need n >= 1 and eps > 0");
  }
  const FinSuppMeasure target = measures::cylinder_distribution(mu, options.depth);
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    Word y = measures::sample_generic(mu, n, Rng::mix(seed, attempt));
    if (passes(mu, y, eps, target, filter, options)) return y;
  }
  throw Error(ErrorKind::kSampling, kModule, "typical_word",
              "no typical word of length " + std::to_string(n) + " within eps " +
                  std::to_string(eps) + " after " + std::to_string(options.max_attempts) +
                  " attempts (acceptance rate 0)");
}

std::size_t estimate_gamma_n(const MarkovMeasure& mu, double eps_tilde, double eps_hat,
                             const std::optional<DimFilter>& filter,
                             const GammaOptions& options) {
  TypicalOptions typical;
  typical.depth = options.depth;
  const FinSuppMeasure target = measures::cylinder_distribution(mu, options.depth);
  const auto needed = static_cast<std::size_t>(
      std::ceil((1.0 - eps_hat) * static_cast<double>(options.samples) - 1e-9));
  auto good = [&](std::size_t n) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < options.samples; ++i) {
      // Fail fast once the quota is out of reach.
      if (ok + (options.samples - i) < needed) return false;
      const Word y = measures::sample_generic(mu, n, Rng::mix(Rng::mix(options.seed, n), i));
      ok += passes(mu, y, eps_tilde, target, filter, typical);
    }
    return ok >= needed;
  };
  std::size_t hi = 1;
  while (!good(hi)) {
    if (hi >= options.cap) return options.cap;
    hi = std::min(hi * 2, options.cap);
  }
  std::size_t lo = hi / 2;  // fails (or zero)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (good(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Itinerary plan_itinerary(const MeasureFamily& family, const PlanOptions& options) {
  const int top = options.max_level;
  if (top < 0 || family.measures.size() < static_cast<std::size_t>(top) + 1) {
    throw Error(ErrorKind::kInput, kModule, "plan_itinerary",
                "family must hold at least max_level + 1 measures");
  }
  const auto levels = static_cast<std::size_t>(top) + 1;
  auto sized = [&](const std::vector<double>& v, const char* name) {
    if (!v.empty() && v.size() < levels) {
      throw Error(ErrorKind::kInput, kModule, "plan_itinerary",
                  std::string(name) + " must list a value for every level 0.." +
                      std::to_string(top));
    }
    return !v.empty();
  };
  std::vector<SimplexNet> nets;
  for (int L = 0; L <= top; ++L) {
    const double mesh = sized(options.net_mesh, "net_mesh") ? options.net_mesh[L] : L + 1.0;
    nets.push_back(simplex_net(L, mesh, options.net_cap));
  }
  std::vector<double> eps_tilde(levels), eps_hat(levels);
  for (int L = 0; L <= top; ++L) {
    eps_tilde[L] = sized(options.eps_tilde, "eps_tilde") ? options.eps_tilde[L]
                                                         : default_eps_tilde(L);
    eps_hat[L] = sized(options.eps_hat, "eps_hat")
                     ? options.eps_hat[L]
                     : default_eps_hat(L, nets[L].cardinality());
  }
  std::vector<std::vector<std::size_t>> gamma;
  if (options.gamma_n) {
    gamma = *options.gamma_n;
  } else {
    gamma.resize(levels);
    std::vector<std::pair<int, int>> jobs;
    for (int L = 0; L <= top; ++L) {
      gamma[L].assign(L + 1, 0);
      for (int l = 0; l <= L; ++l) jobs.emplace_back(L, l);
    }
    parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
      const auto [L, l] = jobs[k];
      GammaOptions g = options.gamma;
      g.seed = Rng::mix(Rng::mix(options.gamma.seed, L), l);
      gamma[L][l] = estimate_gamma_n(family.measures[l], eps_tilde[L], eps_hat[L],
                                     options.filter, g);
    });
  }
  return block_schedule(family, top, std::move(eps_tilde), std::move(eps_hat), std::move(gamma),
                        std::move(nets), options.schedule);
}

ConstructedOrbit build_orbit(const Itinerary& it, const MeasureFamily& family,
                             const ShiftSpace& space, std::uint64_t seed,
                             const OrbitOptions& options) {
  const std::size_t count = it.blocks.size();
  for (const Block& b : it.blocks) {
    if (static_cast<std::size_t>(b.ell) >= family.measures.size()) {
      throw Error(ErrorKind::kInput, kModule, "build_orbit",
                  "itinerary refers to a measure outside the family");
    }
  }
  std::vector<Word> words(count);
  ConstructedOrbit orbit;
  orbit.block_seeds.resize(count);
  for (std::size_t k = 0; k < count; ++k) orbit.block_seeds[k] = Rng::mix(seed, k);
  parallel_for(count, options.threads, [&](std::size_t k) {
    const Block& b = it.blocks[k];
    words[k] = typical_word(family.measures[b.ell], b.length, it.eps_tilde[b.level],
                            orbit.block_seeds[k], options.filter, options.typical);
  });

  std::size_t total = 0;
  for (const Word& w : words) total += w.size();
  orbit.word.reserve(total + count * static_cast<std::size_t>(space.alphabet_size() *
                                                              space.alphabet_size()));
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t bridge = 0;
    if (k > 0) {
      const Word omega = sofic::connector(words[k - 1], words[k], space, 1, true);
      orbit.word.insert(orbit.word.end(), omega.begin(), omega.end());
      bridge = omega.size();
    }
    const std::size_t start = orbit.word.size();
    orbit.word.insert(orbit.word.end(), words[k].begin(), words[k].end());
    Word().swap(words[k]);
    const Block& b = it.blocks[k];
    orbit.spans.push_back({start, orbit.word.size(), b.level, b.j, b.ell});
    orbit.connectors.push_back(bridge);
  }
  return orbit;
}

double log_lambda_measure(const ConstructedOrbit& orbit, const MeasureFamily& family,
                          std::size_t prefix_len) {
  const bool boundary =
      prefix_len == 0 || std::any_of(orbit.spans.begin(), orbit.spans.end(), [&](const auto& s) {
        return s.start == prefix_len || s.end == prefix_len;
      });
  if (!boundary) {
    throw Error(ErrorKind::kAlignment, kModule, "lambda_measure",
                "prefix length " + std::to_string(prefix_len) + " is not a block boundary");
  }
  double log_mu = 0.0;
  for (const BlockSpan& s : orbit.spans) {
    if (s.end > prefix_len) break;
    const std::span<const Symbol> block(orbit.word.data() + s.start, s.end - s.start);
    log_mu += measures::log_cylinder_probability(family.measures[s.ell], block);
  }
  return log_mu;
}

double lambda_measure(const ConstructedOrbit& orbit, const MeasureFamily& family,
                      std::size_t prefix_len) {
  return std::exp(log_lambda_measure(orbit, family, prefix_len));
}

SaturationReport verify_saturation(const ConstructedOrbit& orbit, const Itinerary& it,
                                   const SimplexNet& net, const MeasureFamily& family,
                                   double slack, int depth) {
  SaturationReport report;
  report.level = net.level;
  const ShiftSpace& space = family.measures.front().space();
  report.truncation_bound = space.tail_bound(depth);
  const double eps = static_cast<std::size_t>(net.level) < it.eps_tilde.size()
                         ? it.eps_tilde[net.level]
                         : default_eps_tilde(net.level);
  report.threshold = eps + slack + report.truncation_bound;

  const std::size_t usable =
      orbit.word.size() >= static_cast<std::size_t>(depth) ? orbit.word.size() - depth + 1 : 0;
  std::vector<std::size_t> times;
  // A snapshot at time n reads symbols up to n + depth - 2, so boundaries
  // past `usable` (only the last block's end, in practice) are pulled back.
  for (const BlockSpan& s : orbit.spans) {
    if (s.start > 0) times.push_back(std::min(s.start, usable));
    times.push_back(std::min(s.end, usable));
  }
  times.erase(std::remove(times.begin(), times.end(), std::size_t{0}), times.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  pointwise::TrajectoryCloud cloud;
  if (!times.empty()) cloud = pointwise::build_cloud_at(orbit.word, times, depth, space);
  const auto& snapshots = cloud.snapshots;
  report.pass = true;
  for (std::size_t j = 0; j < net.cardinality(); ++j) {
    NodeCheck node;
    node.weights = net.nodes[j];
    node.reachable = std::any_of(orbit.spans.begin(), orbit.spans.end(), [&](const auto& s) {
      return s.level == net.level && s.j == static_cast<int>(j) && s.ell == net.level;
    });
    if (node.reachable && !times.empty() &&
        static_cast<std::size_t>(net.level) < family.measures.size()) {
      std::vector<MarkovMeasure> comps(family.measures.begin(),
                                       family.measures.begin() + net.level + 1);
      const measures::MarkovMixture mix(std::move(comps), node.weights);
      const FinSuppMeasure target = measures::cylinder_distribution(mix, depth);
      node.distance = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = measures::wasserstein1(snapshots[k], target, depth).value;
        if (d < node.distance) {
          node.distance = d;
          node.time = times[k];
        }
      }
      node.pass = node.distance <= report.threshold;
    } else {
      node.reachable = false;
    }
    report.pass = report.pass && node.reachable && node.pass;
    report.nodes.push_back(std::move(node));
  }
  return report;
}

Word oscillating_orbit(const MarkovMeasure& a, const MarkovMeasure& b, std::size_t first_block,
                       double ratio, std::size_t length, std::uint64_t seed) {
  if (first_block < 1 || !(ratio >= 1.0)) {
    throw Error(ErrorKind::kInput, kModule, "oscillating_orbit",
                "need first_block >= 1 and ratio >= 1");
  }
  if (!(a.space() == b.space())) {
    throw Error(ErrorKind::kInput, kModule, "oscillating_orbit",
                "measures live on different shift spaces");
  }
  Word out;
  out.reserve(length);
  double block = static_cast<double>(first_block);
  for (std::uint64_t k = 0; out.size() < length; ++k) {
    const MarkovMeasure& mu = k % 2 == 0 ? a : b;
    const auto len = static_cast<std::size_t>(std::llround(block));
    const Word w = measures::sample_generic(mu, len, Rng::mix(seed, k));
    if (!out.empty()) {
      const Word omega = sofic::connector(std::span<const Symbol>(out).last(1), w, a.space());
      out.insert(out.end(), omega.begin(), omega.end());
    }
    out.insert(out.end(), w.begin(), w.end());
    block *= ratio;
  }
  out.resize(length);
  return out;
}

}  // namespace elab::construct
