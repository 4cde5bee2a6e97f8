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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elab/error.hpp"
#include "elab/rng.hpp"
#include "elab/simd.hpp"
#include "elab/transport.hpp"

namespace elab::measures {
namespace {

constexpr const char* kModule = "measures";

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_depth(int depth, int m, const char* op) {
  if (depth < 0 || depth > max_code_depth(m)) {
    throw Error(ErrorKind::kInput, kModule, op,
                "depth " + std::to_string(depth) + " outside 0.." +
                    std::to_string(max_code_depth(m)) + " for alphabet size " +
                    std::to_string(m));
  }
}

std::vector<double> stationary_by_power_iteration(const std::vector<double>& p, int m) {
  // The lazy chain (P + I) / 2 has the same stationary vector and is aperiodic.
  std::vector<double> pi(m, 1.0 / m), next(m);
  for (int iter = 0; iter < 1000000; ++iter) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += pi[i] * p[i * m + j];
      next[j] = 0.5 * (acc + pi[j]);
    }
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (int j = 0; j < m; ++j) {
      next[j] /= norm;
      change = std::max(change, std::abs(next[j] - pi[j]));
    }
    pi.swap(next);
    if (change < 1e-16) break;
  }
  return pi;
}

// Cumulative distribution lookup that never returns a zero-probability symbol.
Symbol draw(const double* probs, int m, double u) {
  double acc = 0.0;
  int last = -1;
  for (int s = 0; s < m; ++s) {
    if (probs[s] <= 0.0) continue;
    acc += probs[s];
    last = s;
    if (u < acc) return static_cast<Symbol>(s + 1);
  }
  return static_cast<Symbol>(last + 1);
}

FinSuppMeasure from_codes(std::vector<std::uint64_t>& codes, int m, double beta, int depth) {
  std::sort(codes.begin(), codes.end());
  const double w = 1.0 / static_cast<double>(codes.size());
  std::vector<FinSuppMeasure::Atom> atoms;
  for (std::size_t i = 0; i < codes.size();) {
    std::size_t k = i;
    while (k < codes.size() && codes[k] == codes[i]) ++k;
    atoms.push_back({codes[i], static_cast<double>(k - i) * w});
    i = k;
  }
  return FinSuppMeasure(m, beta, depth, std::move(atoms));
}

}  // namespace

MarkovMeasure::MarkovMeasure(ShiftSpace space, std::vector<std::vector<double>> stochastic,
                             std::optional<std::vector<double>> stationary)
    : space_(std::move(space)) {
  const int m = space_.alphabet_size();
  if (stochastic.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                "stochastic matrix must have " + std::to_string(m) + " rows");
  }
  p_.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    if (stochastic[i].size() != static_cast<std::size_t>(m)) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                  "stochastic row " + std::to_string(i + 1) + " must have " +
                      std::to_string(m) + " entries");
    }
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      const double v = stochastic[i][j];
      if (!(v >= 0.0) || v > 1.0) {
        throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                    "stochastic entries must lie in [0, 1]");
      }
      if (v > 0.0 && !space_.entry(i, j)) {
        throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                    "positive probability on forbidden transition " + std::to_string(i + 1) +
                        "->" + std::to_string(j + 1));
      }
      p_[i * m + j] = v;
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                  "stochastic row " + std::to_string(i + 1) + " sums to " +
                      std::to_string(row));
    }
  }
  if (stationary) {
    pi_ = std::move(*stationary);
    if (pi_.size() != static_cast<std::size_t>(m)) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                  "stationary vector must have " + std::to_string(m) + " entries");
    }
  } else {
    pi_ = stationary_by_power_iteration(p_, m);
  }
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    if (!(pi_[j] >= 0.0)) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                  "stationary entries must be >= 0");
    }
    total += pi_[j];
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += pi_[i] * p_[i * m + j];
    if (std::abs(acc - pi_[j]) > 1e-10) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                  "stationary vector is not invariant at symbol " + std::to_string(j + 1));
    }
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorKind::kInvariant, kModule, "MarkovMeasure",
                "stationary vector must sum to 1");
  }
}

MarkovMeasure MarkovMeasure::bernoulli(std::vector<double> probs, double beta) {
  const int m = static_cast<int>(probs.size());
  std::vector<std::vector<double>> rows(m, probs);
  return MarkovMeasure(ShiftSpace::full_shift(m, beta), std::move(rows), std::move(probs));
}

MarkovMeasure MarkovMeasure::parry(const ShiftSpace& space) {
  const int m = space.alphabet_size();
  // Right and left Perron vectors by power iteration on (A + I).
  std::vector<double> right(m, 1.0), left(m, 1.0), next(m);
  for (int iter = 0; iter < 100000; ++iter) {
    double change = 0.0;
    for (int i = 0; i < m; ++i) {
      double acc = right[i];
      for (int j = 0; j < m; ++j) acc += space.entry(i, j) * right[j];
      next[i] = acc;
    }
    double norm = *std::max_element(next.begin(), next.end());
    for (int i = 0; i < m; ++i) {
      change = std::max(change, std::abs(next[i] / norm - right[i]));
      right[i] = next[i] / norm;
    }
    for (int j = 0; j < m; ++j) {
      double acc = left[j];
      for (int i = 0; i < m; ++i) acc += left[i] * space.entry(i, j);
      next[j] = acc;
    }
    norm = *std::max_element(next.begin(), next.end());
    for (int j = 0; j < m; ++j) {
      change = std::max(change, std::abs(next[j] / norm - left[j]));
      left[j] = next[j] / norm;
    }
    if (change < 1e-16) break;
  }
  const double lambda = std::exp(sofic::topological_entropy(space));
  std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
  std::vector<double> pi(m);
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      if (!space.entry(i, j)) continue;
      rows[i][j] = right[j] / (lambda * right[i]);
      row += rows[i][j];
    }
    for (int j = 0; j < m; ++j) rows[i][j] /= row;
    pi[i] = left[i] * right[i];
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= total;
  return MarkovMeasure(space, std::move(rows), std::move(pi));
}

std::vector<std::vector<double>> MarkovMeasure::stochastic_rows() const {
  const int m = alphabet_size();
  std::vector<std::vector<double>> rows(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) rows[i][j] = p_[i * m + j];
  }
  return rows;
}

int max_code_depth(int m) {
  int depth = 0;
  std::uint64_t size = 1;
  while (size <= (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(m)) {
    size *= static_cast<std::uint64_t>(m);
    ++depth;
  }
  return depth;
}

std::uint64_t encode(std::span<const Symbol> word, int m) {
  std::uint64_t code = 0;
  for (Symbol s : word) code = code * static_cast<std::uint64_t>(m) + (s - 1);
  return code;
}

FinSuppMeasure::FinSuppMeasure(int alphabet_size, double beta, int depth,
                               std::vector<Atom> atoms)
    : m_(alphabet_size), beta_(beta), depth_(depth) {
  check_depth(depth, m_, "FinSuppMeasure");
  const std::uint64_t limit = ipow(static_cast<std::uint64_t>(m_), depth);
  if (atoms.empty()) {
    throw Error(ErrorKind::kInvariant, kModule, "FinSuppMeasure", "measure has no atoms");
  }
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0)) {
      throw Error(ErrorKind::kInvariant, kModule, "FinSuppMeasure", "weights must be >= 0");
    }
    if (a.code >= limit) {
      throw Error(ErrorKind::kInput, kModule, "FinSuppMeasure",
                  "atom code exceeds m^depth");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvariant, kModule, "FinSuppMeasure",
                "weights sum to " + std::to_string(total) + ", expected 1");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.code < y.code; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && atoms_.back().code == a.code) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
}

FinSuppMeasure FinSuppMeasure::from_points(std::span<const PointPrefix> points,
                                           std::span<const double> weights, int depth,
                                           const ShiftSpace& space) {
  if (points.size() != weights.size()) {
    throw Error(ErrorKind::kInput, kModule, "FinSuppMeasure",
                "points and weights differ in length");
  }
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Word w = points[i].materialize(static_cast<std::size_t>(depth));
    atoms.push_back({encode(w, space.alphabet_size()), weights[i]});
  }
  return FinSuppMeasure(space.alphabet_size(), space.beta(), depth, std::move(atoms));
}

Word FinSuppMeasure::word(std::size_t index) const {
  Word w(depth_);
  std::uint64_t code = atoms_[index].code;
  for (int k = depth_ - 1; k >= 0; --k) {
    w[k] = static_cast<Symbol>(code % m_ + 1);
    code /= m_;
  }
  return w;
}

FinSuppMeasure FinSuppMeasure::truncate(int depth) const {
  if (depth < 0 || depth > depth_) {
    throw Error(ErrorKind::kDepth, kModule, "truncate",
                "cannot truncate depth " + std::to_string(depth_) + " measure to " +
                    std::to_string(depth));
  }
  const std::uint64_t div = ipow(static_cast<std::uint64_t>(m_), depth_ - depth);
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    const std::uint64_t code = a.code / div;
    if (!atoms.empty() && atoms.back().code == code) {
      atoms.back().weight += a.weight;
    } else {
      atoms.push_back({code, a.weight});
    }
  }
  return FinSuppMeasure(m_, beta_, depth, std::move(atoms));
}

MarkovMixture::MarkovMixture(std::vector<MarkovMeasure> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty() || components_.size() != weights_.size()) {
    throw Error(ErrorKind::kInvariant, kModule, "MarkovMixture",
                "need one weight per component and at least one component");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMixture", "weights must be >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvariant, kModule, "MarkovMixture", "weights must sum to 1");
  }
  for (const MarkovMeasure& c : components_) {
    if (!(c.space() == components_.front().space())) {
      throw Error(ErrorKind::kInvariant, kModule, "MarkovMixture",
                  "components live on different shift spaces");
    }
  }
}

FinSuppMeasure window_measure(std::span<const Symbol> body, std::span<const Symbol> tail,
                              std::size_t count, int depth, const ShiftSpace& space) {
  const int m = space.alphabet_size();
  check_depth(depth, m, "empirical_measure");
  if (count == 0) {
    throw Error(ErrorKind::kInput, kModule, "empirical_measure", "n must be >= 1");
  }
  const std::size_t need = count + static_cast<std::size_t>(std::max(depth, 1)) - 1;
  if (body.size() + tail.size() < need) {
    throw Error(ErrorKind::kDepth, kModule, "empirical_measure",
                "need " + std::to_string(need) + " symbols, have " +
                    std::to_string(body.size() + tail.size()));
  }
  const std::size_t from_body = std::min(need, body.size());
  sofic::check_symbols(body.first(from_body), space);
  sofic::check_symbols(tail.first(need - from_body), space);
  if (depth == 0) return FinSuppMeasure(m, space.beta(), 0, {{0, 1.0}});
  auto at = [&](std::size_t i) { return i < body.size() ? body[i] : tail[i - body.size()]; };

  const auto mm = static_cast<std::uint64_t>(m);
  const std::uint64_t high = ipow(mm, depth - 1);
  const std::uint64_t size = high * mm;
  std::uint64_t code = 0;
  for (int i = 0; i + 1 < depth; ++i) code = code * mm + (at(i) - 1);
  if (size <= (std::uint64_t{1} << 16) || size <= count) {
    std::vector<std::uint64_t> counts(size, 0);
    for (std::size_t i = 0; i < count; ++i) {
      code = (code % high) * mm + (at(i + depth - 1) - 1);
      ++counts[code];
    }
    const double w = 1.0 / static_cast<double>(count);
    std::vector<FinSuppMeasure::Atom> atoms;
    for (std::uint64_t c = 0; c < size; ++c) {
      if (counts[c]) atoms.push_back({c, static_cast<double>(counts[c]) * w});
    }
    return FinSuppMeasure(m, space.beta(), depth, std::move(atoms));
  }
  std::vector<std::uint64_t> codes(count);
  for (std::size_t i = 0; i < count; ++i) {
    code = (code % high) * mm + (at(i + depth - 1) - 1);
    codes[i] = code;
  }
  return from_codes(codes, m, space.beta(), depth);
}

FinSuppMeasure empirical_measure(std::span<const Symbol> symbols, std::size_t n, int depth,
                                 const ShiftSpace& space) {
  return window_measure(symbols, {}, n, depth, space);
}

FinSuppMeasure empirical_measure(const PointPrefix& x, std::size_t n, int depth,
                                 const ShiftSpace& space) {
  const std::size_t need = n + static_cast<std::size_t>(std::max(depth, 1)) - 1;
  if (x.usable_depth() < need) {
    throw Error(ErrorKind::kDepth, kModule, "empirical_measure",
                "point has usable depth " + std::to_string(x.usable_depth()) + ", need " +
                    std::to_string(need));
  }
  const Word w = x.materialize(need);
  return empirical_measure(w, n, depth, space);
}

FinSuppMeasure periodic_empirical_measure(std::span<const Symbol> word, int depth,
                                          const ShiftSpace& space) {
  if (word.empty()) {
    throw Error(ErrorKind::kInput, kModule, "empirical_measure", "word is empty");
  }
  Word ext(word.begin(), word.end());
  while (ext.size() < word.size() + static_cast<std::size_t>(std::max(depth, 1)) - 1) {
    ext.push_back(word[(ext.size()) % word.size()]);
  }
  return empirical_measure(ext, word.size(), depth, space);
}

MetricValue wasserstein1(const FinSuppMeasure& mu, const FinSuppMeasure& nu, int depth,
                         const TransportOptions& options) {
  if (mu.alphabet_size() != nu.alphabet_size() || mu.beta() != nu.beta()) {
    throw Error(ErrorKind::kInput, kModule, "wasserstein1",
                "measures live on different shift spaces");
  }
  if (depth < 0 || depth > mu.depth() || depth > nu.depth()) {
    throw Error(ErrorKind::kDepth, kModule, "wasserstein1",
                "depth " + std::to_string(depth) + " exceeds the atom depth of an argument");
  }
  const int m = mu.alphabet_size();
  const double beta = mu.beta();
  MetricValue out;
  out.error_bound = (m - 1) * std::pow(beta, -depth) / (beta - 1.0);
  const FinSuppMeasure a = depth == mu.depth() ? mu : mu.truncate(depth);
  const FinSuppMeasure b = depth == nu.depth() ? nu : nu.truncate(depth);
  if (a.size() + b.size() > options.max_atoms) {
    throw Error(ErrorKind::kSize, kModule, "wasserstein1",
                "combined atom count " + std::to_string(a.size() + b.size()) +
                    " exceeds cap " + std::to_string(options.max_atoms));
  }
  if (depth == 0) return out;

  // For a metric cost, mass shared by both measures stays in place, so only
  // the positive and negative parts of mu - nu need transporting.
  std::vector<std::uint64_t> pos_code, neg_code;
  std::vector<double> pos_w, neg_w;
  const auto& aa = a.atoms();
  const auto& ba = b.atoms();
  std::size_t i = 0, j = 0;
  while (i < aa.size() || j < ba.size()) {
    double diff;
    std::uint64_t code;
    if (j == ba.size() || (i < aa.size() && aa[i].code < ba[j].code)) {
      code = aa[i].code;
      diff = aa[i++].weight;
    } else if (i == aa.size() || ba[j].code < aa[i].code) {
      code = ba[j].code;
      diff = -ba[j++].weight;
    } else {
      code = aa[i].code;
      diff = aa[i++].weight - ba[j++].weight;
    }
    if (diff > 0.0) {
      pos_code.push_back(code);
      pos_w.push_back(diff);
    } else if (diff < 0.0) {
      neg_code.push_back(code);
      neg_w.push_back(-diff);
    }
  }
  if (pos_code.empty() || neg_code.empty()) return out;

  const std::size_t rows = pos_code.size();
  const std::size_t cols = neg_code.size();
  const auto d = static_cast<std::size_t>(depth);
  std::vector<double> scale(d);
  double s = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    s /= beta;
    scale[k] = s;
  }
  auto embed = [&](std::uint64_t code, double* dst, std::size_t stride) {
    for (std::size_t k = d; k-- > 0;) {
      dst[k * stride] = static_cast<double>(code % m) * scale[k];
      code /= m;
    }
  };
  std::vector<double> points(d * cols);
  for (std::size_t c = 0; c < cols; ++c) embed(neg_code[c], points.data() + c, cols);
  std::vector<double> cost(rows * cols), query(d);
  const simd::KernelTable& kern = simd::kernels();
  for (std::size_t r = 0; r < rows; ++r) {
    embed(pos_code[r], query.data(), 1);
    kern.l1_distances(query.data(), points.data(), cols, cols, d, cost.data() + r * cols);
  }
  out.value = transport::solve(pos_w, neg_w, cost).cost;
  return out;
}

double cylinder_probability(const MarkovMeasure& mu, std::span<const Symbol> u) {
  if (u.empty()) return 1.0;
  sofic::check_symbols(u, mu.space());
  double p = mu.stationary(u[0]);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) p *= mu.transition(u[i], u[i + 1]);
  return p;
}

double log_cylinder_probability(const MarkovMeasure& mu, std::span<const Symbol> u) {
  if (u.empty()) return 0.0;
  sofic::check_symbols(u, mu.space());
  double lp = std::log(mu.stationary(u[0]));
  for (std::size_t i = 0; i + 1 < u.size(); ++i) lp += std::log(mu.transition(u[i], u[i + 1]));
  return lp;
}

FinSuppMeasure cylinder_distribution(const MarkovMeasure& mu, int depth) {
  const int m = mu.alphabet_size();
  check_depth(depth, m, "cylinder_distribution");
  if (depth == 0) return FinSuppMeasure(m, mu.space().beta(), 0, {{0, 1.0}});
  std::vector<FinSuppMeasure::Atom> layer;
  for (int s = 1; s <= m; ++s) {
    const double p = mu.stationary(static_cast<Symbol>(s));
    if (p > 0.0) layer.push_back({static_cast<std::uint64_t>(s - 1), p});
  }
  for (int level = 1; level < depth; ++level) {
    std::vector<FinSuppMeasure::Atom> next;
    next.reserve(layer.size() * 2);
    for (const auto& a : layer) {
      const auto last = static_cast<Symbol>(a.code % m + 1);
      for (int s = 1; s <= m; ++s) {
        const double p = mu.transition(last, static_cast<Symbol>(s));
        if (p > 0.0) next.push_back({a.code * m + (s - 1), a.weight * p});
      }
    }
    layer.swap(next);
  }
  // Renormalize away the rounding drift of long products.
  double total = 0.0;
  for (const auto& a : layer) total += a.weight;
  for (auto& a : layer) a.weight /= total;
  return FinSuppMeasure(m, mu.space().beta(), depth, std::move(layer));
}

FinSuppMeasure cylinder_distribution(const MarkovMixture& mix, int depth) {
  const MarkovMeasure& first = mix.components().front();
  std::vector<FinSuppMeasure::Atom> atoms;
  for (std::size_t l = 0; l < mix.components().size(); ++l) {
    const double t = mix.weights()[l];
    if (t <= 0.0) continue;
    const FinSuppMeasure part = cylinder_distribution(mix.components()[l], depth);
    for (const auto& a : part.atoms()) atoms.push_back({a.code, t * a.weight});
  }
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  for (auto& a : atoms) a.weight /= total;
  return FinSuppMeasure(first.alphabet_size(), first.space().beta(), depth, std::move(atoms));
}

double measure_entropy(const MarkovMeasure& mu) {
  const int m = mu.alphabet_size();
  double h = 0.0;
  for (int i = 1; i <= m; ++i) {
    double row = 0.0;
    for (int j = 1; j <= m; ++j) {
      const double p = mu.transition(static_cast<Symbol>(i), static_cast<Symbol>(j));
      if (p > 0.0) row -= p * std::log(p);
    }
    h += mu.stationary(static_cast<Symbol>(i)) * row;
  }
  return h;
}

Word sample_generic(const MarkovMeasure& mu, std::size_t n, std::uint64_t seed,
                    std::optional<Symbol> start) {
  if (n == 0) {
    throw Error(ErrorKind::kInput, kModule, "sample_generic", "n must be >= 1");
  }
  const int m = mu.alphabet_size();
  Rng rng(seed);
  Word w(n);
  if (start) {
    sofic::check_symbols(std::span<const Symbol>(&*start, 1), mu.space());
    w[0] = *start;
  } else {
    w[0] = draw(mu.stationary_vector().data(), m, rng.uniform());
  }
  const auto rows = mu.stochastic_rows();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m) * m);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  for (std::size_t i = 1; i < n; ++i) {
    w[i] = draw(flat.data() + static_cast<std::size_t>(w[i - 1] - 1) * m, m, rng.uniform());
  }
  return w;
}

PointPrefix generic_point(const MarkovMeasure& mu, std::size_t length, std::uint64_t seed,
                          std::string measure_id) {
  Word w = sample_generic(mu, length, seed);
  return PointPrefix::generated(std::move(w), 0, {seed, std::move(measure_id)}, mu.space());
}

FinSuppMeasure mixture_distance_proxy(const MarkovMixture& mix, std::size_t n,
                                      std::uint64_t seed, const ProxyOptions& options) {
  if (n == 0 || options.samples == 0) {
    throw Error(ErrorKind::kInput, kModule, "mixture_distance_proxy",
                "n and the sample count must be >= 1");
  }
  const auto& comps = mix.components();
  const auto& t = mix.weights();
  const std::size_t k = comps.size();
  const auto total = static_cast<double>(options.samples);

  // Largest remainder allocation, ties to the lower index.
  std::vector<std::size_t> share(k);
  std::vector<std::pair<double, std::size_t>> frac(k);
  std::size_t used = 0;
  for (std::size_t l = 0; l < k; ++l) {
    const double exact = t[l] * total;
    share[l] = static_cast<std::size_t>(std::floor(exact));
    used += share[l];
    frac[l] = {exact - std::floor(exact), l};
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t r = 0; used < options.samples; ++r, ++used) ++share[frac[r % k].second];

  const int m = comps.front().alphabet_size();
  const std::size_t depth = static_cast<std::size_t>(options.depth);
  const std::size_t len = std::min(n, std::max<std::size_t>(depth, 1));
  std::vector<FinSuppMeasure::Atom> atoms;
  atoms.reserve(options.samples);
  const double w = 1.0 / total;
  for (std::size_t l = 0; l < k; ++l) {
    const std::uint64_t stream = Rng::mix(seed, l);
    for (std::size_t s = 0; s < share[l]; ++s) {
      const Word word = sample_generic(comps[l], len, Rng::mix(stream, s));
      std::uint64_t code = 0;
      for (std::size_t i = 0; i < depth; ++i) code = code * m + (word[i % word.size()] - 1);
      atoms.push_back({code, w});
    }
  }
  return FinSuppMeasure(m, comps.front().space().beta(), options.depth, std::move(atoms));
}

}  // namespace elab::measures
