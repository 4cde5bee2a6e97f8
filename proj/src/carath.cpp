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


#include "elab/carath.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <atomic>
#include <map>
#include <string>

#include "elab/error.hpp"
#include "elab/parallel.hpp"
#include "elab/rng.hpp"

namespace elab::carath {
namespace {

constexpr const char* kModule = "carath";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

void check_compatible(const ShiftSpace& space, const LocalPotential& phi, const char* op) {
  if (phi.alphabet_size() != space.alphabet_size()) {
    throw Error(ErrorKind::kInput, kModule, op, "potential alphabet does not match the space");
  }
}

// Calls visit(w) for every admissible word of length `len` extending
// `prefix` (which may be empty).
void for_each_extension(const ShiftSpace& space, Word& prefix, std::size_t len,
                        const std::function<void(Word&)>& visit) {
  if (prefix.size() == len) {
    visit(prefix);
    return;
  }
  for (int s = 1; s <= space.alphabet_size(); ++s) {
    const auto sym = static_cast<Symbol>(s);
    if (!prefix.empty() && !space.allowed(prefix.back(), sym)) continue;
    prefix.push_back(sym);
    for_each_extension(space, prefix, len, visit);
    prefix.pop_back();
  }
}

std::vector<Word> words_of_length(const ShiftSpace& space, std::size_t len) {
  std::vector<Word> out;
  Word w;
  for_each_extension(space, w, len, [&](Word& v) { out.push_back(v); });
  return out;
}

std::uint64_t count_extensions(const ShiftSpace& space, std::span<const Symbol> prefix,
                               std::size_t len) {
  const int m = space.alphabet_size();
  if (prefix.size() >= len) return 1;
  std::vector<std::uint64_t> ways(m, 0);
  if (prefix.empty()) {
    std::fill(ways.begin(), ways.end(), 1);
  } else {
    ways[prefix.back() - 1] = 1;
  }
  std::size_t have = std::max<std::size_t>(prefix.size(), 1);
  for (; have < len; ++have) {
    std::vector<std::uint64_t> next(m, 0);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        if (!space.entry(a, b)) continue;
        if (__builtin_add_overflow(next[b], ways[a], &next[b])) {
          return std::numeric_limits<std::uint64_t>::max();
        }
      }
    }
    ways.swap(next);
  }
  std::uint64_t total = 0;
  for (auto v : ways) {
    if (__builtin_add_overflow(total, v, &total)) return std::numeric_limits<std::uint64_t>::max();
  }
  return total;
}

bool is_prefix(std::span<const Symbol> p, std::span<const Symbol> w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

double fixed_windows_sum(const LocalPotential& phi, std::span<const Symbol> u) {
  const auto k = static_cast<std::size_t>(phi.window());
  double a = 0.0;
  for (std::size_t i = 0; i + k <= u.size(); ++i) a += phi(u.subspan(i, k));
  return a;
}

// log q(C(w), t) = additive(w) + b(last r symbols, |w|): the first part adds
// up along tree paths, the rest only sees the state. Full subtrees are then
// memoized per (state, length).
double additive_part(const CStructure& s, std::span<const Symbol> w, double t) {
  switch (s.kind()) {
    case StructureKind::kPressure:
      return fixed_windows_sum(*s.potential(), w);
    case StructureKind::kAppendix:
      return t == 0.0 ? 0.0 : -t * fixed_windows_sum(*s.potential(), w);
    default:
      return 0.0;
  }
}

std::size_t state_length(const CStructure& s) {
  return s.potential() ? std::max<std::size_t>(s.potential()->window() - 1, 1) : 1;
}

// Generic cover recursion in log space. `gate(w)` false prunes the subtree
// (it contributes nothing); `leaf(w)` decides membership at depth_cap;
// `full(w)` marks nodes whose whole subtree lies in the target.
struct CoverDp {
  using Memo = std::map<std::pair<Word, std::size_t>, double>;

  const CStructure& s;
  double t;
  std::size_t step;
  std::size_t cap;
  std::function<bool(std::span<const Symbol>)> gate;
  std::function<bool(std::span<const Symbol>)> leaf;
  std::function<bool(std::span<const Symbol>)> full;

  double node(Word& w, Memo& memo) const {
    if (full(w)) return full_node(w, memo);
    if (w.size() >= cap) return leaf(w) ? s.log_q(w, t) : kNegInf;
    double acc = kNegInf;
    const std::size_t base = w.size();
    for_each_extension(s.space(), w, base + step, [&](Word& child) {
      if (gate(child)) acc = log_add(acc, node(child, memo));
    });
    if (acc == kNegInf) return kNegInf;
    return std::min(s.log_q(w, t), acc);
  }

  double full_node(Word& w, Memo& memo) const {
    const std::size_t r = state_length(s);
    const double a = additive_part(s, w, t);
    if (w.size() < r) return a + relative(w, a, memo);
    std::pair<Word, std::size_t> key{Word(w.end() - static_cast<std::ptrdiff_t>(r), w.end()),
                                     w.size()};
    if (auto it = memo.find(key); it != memo.end()) return a + it->second;
    const double g = relative(w, a, memo);
    memo.emplace(std::move(key), g);
    return a + g;
  }

  // f(w) - additive(w) inside a full subtree.
  double relative(Word& w, double a, Memo& memo) const {
    const double own = s.log_q(w, t) - a;
    if (w.size() >= cap) return own;
    double acc = kNegInf;
    const std::size_t base = w.size();
    for_each_extension(s.space(), w, base + step,
                       [&](Word& child) { acc = log_add(acc, full_node(child, memo) - a); });
    return std::min(own, acc);
  }

  // The whole space is not itself a cover element: sum over the first layer.
  double root(unsigned threads) const {
    std::vector<Word> first;
    Word empty;
    for_each_extension(s.space(), empty, step, [&](Word& w) {
      if (gate(w)) first.push_back(w);
    });
    std::vector<double> parts(first.size());
    parallel_for(first.size(), threads, [&](std::size_t i) {
      Word w = first[i];
      Memo memo;
      parts[i] = node(w, memo);
    });
    double acc = kNegInf;
    for (double v : parts) acc = log_add(acc, v);
    return acc;
  }
};

double cover_measure(const CStructure& s, std::span<const Word> target, double t, int step,
                     int depth_cap, unsigned threads, const char* op) {
  if (step < 1 || depth_cap < step || depth_cap % step != 0) {
    throw Error(ErrorKind::kInput, kModule, op,
                "depth_cap must be a positive multiple of the block length");
  }
  for (const Word& w : target) {
    if (w.size() > static_cast<std::size_t>(depth_cap)) {
      throw Error(ErrorKind::kRepresentation, kModule, op,
                  "target cylinder of length " + std::to_string(w.size()) +
                      " is deeper than depth_cap " + std::to_string(depth_cap));
    }
    if (!w.empty() && !sofic::is_admissible(w, s.space())) {
      throw Error(ErrorKind::kInput, kModule, op, "target word is not admissible");
    }
  }
  CoverDp dp{s,
             t,
             static_cast<std::size_t>(step),
             static_cast<std::size_t>(depth_cap),
             [&](std::span<const Symbol> w) {
               return std::any_of(target.begin(), target.end(), [&](const Word& c) {
                 return is_prefix(c, w) || is_prefix(w, c);
               });
             },
             [&](std::span<const Symbol> w) {
               return std::any_of(target.begin(), target.end(),
                                  [&](const Word& c) { return is_prefix(c, w); });
             },
             [&](std::span<const Symbol> w) {
               return std::any_of(target.begin(), target.end(),
                                  [&](const Word& c) { return is_prefix(c, w); });
             }};
  return std::exp(dp.root(threads));
}

// max over continuations of the windows that start inside `tail`, where
// tail holds the last min(l, k-1) symbols of a word of length l; windows
// starting before index `first_open` of tail are already counted.
double continuation_sup(const ShiftSpace& space, const LocalPotential& phi,
                        std::span<const Symbol> tail, std::size_t word_len) {
  const auto k = static_cast<std::size_t>(phi.window());
  if (k == 1) return 0.0;
  std::map<Word, double> states{{Word(tail.begin(), tail.end()), 0.0}};
  // Appending the symbol at absolute position p completes the window that
  // starts at p - k + 1, if that index is >= 0.
  for (std::size_t p = word_len; p + 1 < word_len + k; ++p) {
    std::map<Word, double> next;
    for (const auto& [w, v] : states) {
      for (int s = 1; s <= space.alphabet_size(); ++s) {
        const auto sym = static_cast<Symbol>(s);
        if (!w.empty() && !space.allowed(w.back(), sym)) continue;
        Word grown = w;
        grown.push_back(sym);
        double value = v;
        if (p + 1 >= k) value += phi(std::span<const Symbol>(grown).last(k));
        if (grown.size() > k - 1) grown.erase(grown.begin());
        auto [it, fresh] = next.emplace(std::move(grown), value);
        if (!fresh) it->second = std::max(it->second, value);
      }
    }
    states.swap(next);
  }
  double best = kNegInf;
  for (const auto& [w, v] : states) best = std::max(best, v);
  return best;
}

std::vector<Word> all_windows(const ShiftSpace& space, int k) {
  return words_of_length(space, static_cast<std::size_t>(k));
}


}  // namespace

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::kEntropy:
      return "entropy";
    case StructureKind::kHausdorff:
      return "hausdorff";
    case StructureKind::kPressure:
      return "pressure";
    case StructureKind::kAppendix:
      return "appendix";
  }
  return "unknown";
}

double sup_birkhoff_sum(const ShiftSpace& space, const LocalPotential& phi,
                        std::span<const Symbol> u) {
  check_compatible(space, phi, "sup_birkhoff_sum");
  if (u.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(phi.window());
  const std::size_t keep = std::min(u.size(), k - 1);
  return fixed_windows_sum(phi, u) + continuation_sup(space, phi, u.last(keep), u.size());
}

CStructure::CStructure(StructureKind kind, ShiftSpace space,
                       std::optional<LocalPotential> potential)
    : kind_(kind), space_(std::move(space)), potential_(std::move(potential)) {}

CStructure CStructure::entropy(ShiftSpace space) {
  return CStructure(StructureKind::kEntropy, std::move(space), std::nullopt);
}

CStructure CStructure::hausdorff(ShiftSpace space) {
  return CStructure(StructureKind::kHausdorff, std::move(space), std::nullopt);
}

CStructure CStructure::pressure(ShiftSpace space, LocalPotential phi) {
  check_compatible(space, phi, "CStructure");
  return CStructure(StructureKind::kPressure, std::move(space), std::move(phi));
}

CStructure CStructure::appendix(ShiftSpace space, LocalPotential u) {
  check_compatible(space, u, "CStructure");
  if (!(u.min_over(space) > 0.0)) {
    throw Error(ErrorKind::kInvariant, kModule, "CStructure",
                "appendix potential u must be positive on every admissible window");
  }
  return CStructure(StructureKind::kAppendix, std::move(space), std::move(u));
}

double CStructure::log_xi(std::span<const Symbol> u) const {
  if (kind_ == StructureKind::kPressure) return sup_birkhoff_sum(space_, *potential_, u);
  return 0.0;
}

double CStructure::log_eta(std::span<const Symbol> u) const {
  const auto l = static_cast<double>(u.size());
  switch (kind_) {
    case StructureKind::kEntropy:
    case StructureKind::kPressure:
      return -l;
    case StructureKind::kHausdorff: {
      const double beta = space_.beta();
      return std::log((space_.alphabet_size() - 1) / (beta - 1.0)) - l * std::log(beta);
    }
    case StructureKind::kAppendix:
      return -sup_birkhoff_sum(space_, *potential_, u);
  }
  return 0.0;
}

double CStructure::psi(std::span<const Symbol> u) const {
  return u.empty() ? 0.0 : 1.0 / static_cast<double>(u.size());
}

double CStructure::log_q(std::span<const Symbol> u, double t) const {
  // t * log eta with t = 0 must not turn an infinite log into NaN.
  const double eta_part = t == 0.0 ? 0.0 : t * log_eta(u);
  return log_xi(u) + eta_part;
}

double q_weight(const CStructure& s, std::span<const Symbol> u, double t) {
  return std::exp(s.log_q(u, t));
}

double outer_measure_M(const CStructure& s, std::span<const Word> target, double t,
                       int depth_cap, const DpOptions& options) {
  return cover_measure(s, target, t, 1, depth_cap, options.threads, "outer_measure_M");
}

double outer_measure_N(const CStructure& s, std::span<const Word> target, double t, int m_blk,
                       int depth_cap, const DpOptions& options) {
  return cover_measure(s, target, t, m_blk, depth_cap, options.threads, "outer_measure_N");
}

double pressure_partition(const ShiftSpace& space, const LocalPotential& phi, int n) {
  check_compatible(space, phi, "pressure_partition");
  if (n < 1) throw Error(ErrorKind::kInput, kModule, "pressure_partition", "need n >= 1");
  const auto k = static_cast<std::size_t>(phi.window());
  const std::size_t r = std::max<std::size_t>(k - 1, 1);
  const auto len = static_cast<std::size_t>(n);
  double total = kNegInf;
  if (len <= r) {
    for (const Word& w : words_of_length(space, len)) {
      total = log_add(total, sup_birkhoff_sum(space, phi, w));
    }
    return total / n;
  }
  // State: the last r symbols; value: log of the summed exp(completed
  // windows) over all words with that ending.
  std::map<Word, double> states;
  for (const Word& w : words_of_length(space, r)) states[w] = fixed_windows_sum(phi, w);
  for (std::size_t p = r; p < len; ++p) {
    std::map<Word, double> next;
    for (const auto& [w, v] : states) {
      for (int s = 1; s <= space.alphabet_size(); ++s) {
        const auto sym = static_cast<Symbol>(s);
        if (!space.allowed(w.back(), sym)) continue;
        Word grown = w;
        grown.push_back(sym);
        const double value = v + phi(std::span<const Symbol>(grown).last(k));
        grown.erase(grown.begin());
        auto [it, fresh] = next.emplace(std::move(grown), value);
        if (!fresh) it->second = log_add(it->second, value);
      }
    }
    states.swap(next);
  }
  for (const auto& [w, v] : states) {
    const double tail = k == 1 ? 0.0 : continuation_sup(space, phi, w, len);
    total = log_add(total, v + tail);
  }
  return total / n;
}

double pressure_partition(const CStructure& s, int n) {
  if (s.kind() == StructureKind::kPressure) return pressure_partition(s.space(), *s.potential(), n);
  return pressure_partition(s.space(), LocalPotential::constant(s.space().alphabet_size(), 0.0), n);
}

double pressure_exact(const ShiftSpace& space, const LocalPotential& phi,
                      const PressureOptions& options) {
  check_compatible(space, phi, "pressure_exact");
  const int k = phi.window();
  if (k > options.max_window) {
    throw Error(ErrorKind::kSize, kModule, "pressure_exact",
                "window " + std::to_string(k) + " exceeds cap " +
                    std::to_string(options.max_window));
  }
  const std::size_t r = std::max(k - 1, 1);
  const std::vector<Word> states = words_of_length(space, r);
  if (states.size() > options.max_states) {
    throw Error(ErrorKind::kSize, kModule, "pressure_exact",
                std::to_string(states.size()) + " transfer states exceed cap " +
                    std::to_string(options.max_states));
  }
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;
  const std::size_t n = states.size();
  // Weights are shifted by the maximum to keep entries in range.
  const double shift = phi.max_over(space);
  std::vector<double> matrix(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Word& w = states[i];
    for (int s = 1; s <= space.alphabet_size(); ++s) {
      const auto sym = static_cast<Symbol>(s);
      if (!space.allowed(w.back(), sym)) continue;
      Word grown = w;
      grown.push_back(sym);
      // For k = 1 the weight belongs to the current symbol.
      const double value = k == 1 ? phi(std::span<const Symbol>(w)) : phi(grown);
      Word to(grown.end() - static_cast<std::ptrdiff_t>(r), grown.end());
      matrix[i * n + index.at(to)] = std::exp(value - shift);
    }
  }
  return sofic::log_perron_root(matrix, n) + shift;
}

double bowen_dimension(const ShiftSpace& space, const LocalPotential& u,
                       const PressureOptions& options) {
  check_compatible(space, u, "bowen_dimension");
  const double u_min = u.min_over(space);
  if (!(u_min > 0.0)) {
    throw Error(ErrorKind::kInput, kModule, "bowen_dimension",
                "u must be positive on every admissible window");
  }
  const double h = sofic::topological_entropy(space);
  double lo = 0.0, hi = h / u_min;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (pressure_exact(space, u.scaled(-mid), options) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double space_dimension(const CStructure& s) {
  switch (s.kind()) {
    case StructureKind::kEntropy:
      return sofic::topological_entropy(s.space());
    case StructureKind::kHausdorff:
      return sofic::topological_entropy(s.space()) / std::log(s.space().beta());
    case StructureKind::kPressure:
      return pressure_exact(s.space(), *s.potential());
    case StructureKind::kAppendix:
      return bowen_dimension(s.space(), *s.potential());
  }
  return 0.0;
}

double integrate(const LocalPotential& phi, const measures::MarkovMeasure& mu) {
  check_compatible(mu.space(), phi, "integrate");
  double total = 0.0;
  for (const Word& w : all_windows(mu.space(), phi.window())) {
    total += measures::cylinder_probability(mu, w) * phi(w);
  }
  return total;
}

double measure_dimension(const CStructure& s, const measures::MarkovMeasure& mu) {
  if (!(mu.space() == s.space())) {
    throw Error(ErrorKind::kInput, kModule, "measure_dimension",
                "measure and structure live on different spaces");
  }
  const double h = measures::measure_entropy(mu);
  switch (s.kind()) {
    case StructureKind::kEntropy:
      return h;
    case StructureKind::kHausdorff:
      return h / std::log(s.space().beta());
    case StructureKind::kPressure:
      return h + integrate(*s.potential(), mu);
    case StructureKind::kAppendix:
      return h / integrate(*s.potential(), mu);
  }
  return 0.0;
}

ConditionReport check_conditions(const CStructure& s, int depth, std::vector<double> t_grid,
                                 const ConditionOptions& options) {
  if (depth < 2 || depth > options.max_depth) {
    throw Error(ErrorKind::kInput, kModule, "check_conditions",
                "depth must lie in 2.." + std::to_string(options.max_depth));
  }
  const ShiftSpace& space = s.space();
  ConditionReport report;
  report.depth = depth;
  report.cylinder_depth = std::min(depth, options.cylinder_depth);
  report.t_grid = std::move(t_grid);
  report.dimension = space_dimension(s);

  std::vector<std::vector<Word>> layers(depth + 1);
  for (int l = 1; l <= depth; ++l) layers[l] = words_of_length(space, l);

  // C4 on parent/child pairs; nested pairs follow by transitivity.
  report.c4 = true;
  for (int l = 1; l < depth && report.c4; ++l) {
    for (const Word& w : layers[l + 1]) {
      const std::span<const Symbol> parent(w.data(), w.size() - 1);
      if (s.log_eta(w) > s.log_eta(parent) + 1e-12) {
        report.c4 = false;
        break;
      }
    }
  }

  // C3: largest |log q(uv) - log q(u) - log q(v)|, tracked by total length
  // so a bound still growing at the last length is visible.
  double worst = 0.0, worst_before_last = 0.0;
  for (int l = 2; l <= depth; ++l) {
    for (const Word& w : layers[l]) {
      for (int cut = 1; cut < l; ++cut) {
        const std::span<const Symbol> all(w), u = all.first(cut), v = all.subspan(cut);
        for (double t : report.t_grid) {
          worst = std::max(worst, std::abs(s.log_q(all, t) - s.log_q(u, t) - s.log_q(v, t)));
        }
      }
    }
    if (l == depth - 1) worst_before_last = worst;
  }
  report.q3_estimate = std::exp(worst);
  report.c3 = std::isfinite(worst) && worst <= worst_before_last + 1e-9 * (1.0 + worst);

  // C1 and C2 use the cover recursions on every cylinder up to
  // cylinder_depth.
  auto tested_layers = [&](int step) {
    std::vector<int> lengths;
    for (int l = step; l <= std::max(report.cylinder_depth, step); l += step) {
      if (words_of_length(space, l).size() <= options.max_cylinders) lengths.push_back(l);
    }
    return lengths;
  };
  report.q1_estimate = std::numeric_limits<double>::infinity();
  report.c2 = true;
  bool any_c1 = false;
  for (double t : report.t_grid) {
    if (!(t < report.dimension)) {
      report.m_of_t.push_back(0);
      continue;
    }
    for (int l : tested_layers(1)) {
      for (const Word& c : words_of_length(space, l)) {
        const Word target[] = {c};
        const double log_m =
            std::log(outer_measure_M(s, target, t, l + options.extra_depth));
        double best = std::numeric_limits<double>::infinity();
        for (int p = 1; p <= l; ++p) {
          const double lq = s.log_q(std::span<const Symbol>(c).first(p), t);
          if (lq >= log_m - 1e-12) best = std::min(best, lq);
        }
        report.q1_estimate = std::min(report.q1_estimate, std::exp(log_m - best));
        any_c1 = true;
      }
    }
    int found = -1;
    for (int m = 1; m <= options.max_m && found < 0; ++m) {
      const int extra = m * std::max(1, (options.extra_depth + m - 1) / m);
      bool ok = true;
      for (int l : tested_layers(m)) {
        for (const Word& c : words_of_length(space, l)) {
          const Word target[] = {c};
          const double log_n = std::log(outer_measure_N(s, target, t, m, l + extra));
          double best = std::numeric_limits<double>::infinity();
          for (int p = m; p <= l; p += m) {
            best = std::min(best, s.log_q(std::span<const Symbol>(c).first(p), t));
          }
          if (std::abs(log_n - best) > 1e-12 * (1.0 + std::abs(best))) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) found = m;
    }
    report.m_of_t.push_back(found);
    report.c2 = report.c2 && found > 0;
  }
  if (!any_c1) report.q1_estimate = 0.0;
  report.c1 = any_c1 && report.q1_estimate > 0.0;
  return report;
}

RestrictedProbe restricted_outer_measure(const CStructure& s, std::span<const Symbol> z,
                                         const measures::MarkovMeasure& mu, std::size_t n,
                                         double eps, double t, int m_blk, int depth_cap,
                                         const RestrictedOptions& options) {
  const ShiftSpace& space = s.space();
  if (!(mu.space() == space)) {
    throw Error(ErrorKind::kInput, kModule, "restricted_outer_measure",
                "measure and structure live on different spaces");
  }
  if (n < 1 || m_blk < 1 || depth_cap < m_blk || depth_cap % m_blk != 0 || options.depth < 1) {
    throw Error(ErrorKind::kInput, kModule, "restricted_outer_measure",
                "need n >= 1 and depth_cap a positive multiple of m_blk");
  }
  if (z.size() > static_cast<std::size_t>(depth_cap)) {
    throw Error(ErrorKind::kRepresentation, kModule, "restricted_outer_measure",
                "z is deeper than depth_cap");
  }
  if (!z.empty() && !sofic::is_admissible(z, space)) {
    throw Error(ErrorKind::kInput, kModule, "restricted_outer_measure", "z is not admissible");
  }
  const std::size_t step = static_cast<std::size_t>(m_blk);
  const std::size_t cap = static_cast<std::size_t>(depth_cap);
  const std::size_t need = n + static_cast<std::size_t>(options.depth) - 1;
  // Membership is decided on the first tree level at or beyond this length.
  std::size_t decide = std::min(need, cap);
  decide = (decide + step - 1) / step * step;
  const std::uint64_t count = count_extensions(space, z, decide);
  if (count > options.max_tested) {
    throw Error(ErrorKind::kSize, kModule, "restricted_outer_measure",
                std::to_string(count) + " cylinders to test exceed cap " +
                    std::to_string(options.max_tested));
  }
  const measures::FinSuppMeasure target = measures::cylinder_distribution(mu, options.depth);

  auto close = [&](std::span<const Symbol> body, const Word& tail) {
    const auto e = measures::window_measure(body, tail, n, options.depth, space);
    return measures::wasserstein1(e, target, options.depth).value < eps;
  };
  auto greedy_tail = [&](std::span<const Symbol> w, bool smallest) {
    Word tail;
    Symbol last = w.back();
    while (tail.size() < need) {
      for (int k = 1; k <= space.alphabet_size(); ++k) {
        const auto sym = static_cast<Symbol>(smallest ? k : space.alphabet_size() + 1 - k);
        if (space.allowed(last, sym)) {
          last = sym;
          break;
        }
      }
      tail.push_back(last);
    }
    return tail;
  };
  auto survives = [&](std::span<const Symbol> w) {
    if (!options.strict) {
      const Word omega = sofic::connector(w.last(1), w.first(1), space, 1, true);
      Word tail;
      while (tail.size() < need) {
        tail.insert(tail.end(), omega.begin(), omega.end());
        tail.insert(tail.end(), w.begin(), w.end());
      }
      return close(w, tail);
    }
    if (!close(w, greedy_tail(w, true)) || !close(w, greedy_tail(w, false))) return false;
    std::uint64_t key = options.seed;
    for (Symbol c : w) key = Rng::mix(key, c);
    Rng rng(key, 0);
    Word tail;
    Symbol last = w.back();
    std::vector<Symbol> options_for;
    while (tail.size() < need) {
      options_for.clear();
      for (int k = 1; k <= space.alphabet_size(); ++k) {
        if (space.allowed(last, static_cast<Symbol>(k))) options_for.push_back(static_cast<Symbol>(k));
      }
      last = options_for[rng.below(options_for.size())];
      tail.push_back(last);
    }
    return close(w, tail);
  };

  std::atomic<std::size_t> tested{0}, passed{0};
  CoverDp dp{s,
             t,
             step,
             cap,
             [&](std::span<const Symbol> w) {
               if (!is_prefix(z, w) && !is_prefix(w, z)) return false;
               if (w.size() == decide) {
                 tested.fetch_add(1, std::memory_order_relaxed);
                 if (!survives(w)) return false;
                 passed.fetch_add(1, std::memory_order_relaxed);
               }
               return true;
             },
             [&](std::span<const Symbol> w) { return is_prefix(z, w); },
             [&](std::span<const Symbol> w) { return w.size() >= decide && is_prefix(z, w); }};
  RestrictedProbe probe;
  probe.value = std::exp(dp.root(options.threads));
  probe.tested = tested.load();
  probe.survivors = passed.load();
  return probe;
}

}  // namespace elab::carath
