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

#include "elab/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

#include "elab/carath.hpp"
#include "elab/construct.hpp"
#include "elab/parallel.hpp"
#include "elab/pointwise.hpp"
#include "elab/rng.hpp"

namespace elab::cli {
namespace {

namespace fs = std::filesystem;
using io::Checker;
using io::Csv;
using io::pointer_append;
using io::ViolationKind;

constexpr const char* kModule = "cli";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kErrorFile = "error.json";

// Derived seed streams; fixed so that runs are reproducible from the config.
constexpr std::uint64_t kGammaStream = 1;
constexpr std::uint64_t kOrbitStream = 2;
constexpr std::uint64_t kSourceStream = 3;
constexpr std::uint64_t kProbeStream = 4;

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  std::map<std::string, std::uint64_t> seeds;
  void add(std::string name, std::string body) { files.emplace_back(std::move(name), std::move(body)); }
};

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

std::string size_text(std::size_t v) { return std::to_string(v); }

bool admissible_word(const Word& w, const sofic::ShiftSpace& space, const std::string& ptr,
                     Checker& chk) {
  if (!sofic::is_admissible(w, space)) {
    chk.fail(ptr, ViolationKind::kInvariant, "word is not admissible in the shift space");
    return false;
  }
  return true;
}

// ---- entropy

struct EntropyParams {
  std::vector<int> counts;
};

std::optional<EntropyParams> parse_entropy(const json& p, const std::string& ptr,
                                           const sofic::ShiftSpace&, Checker& chk) {
  chk.only(p, ptr, {"counts"});
  EntropyParams out;
  if (p.contains("counts")) {
    auto c = chk.integers(p, ptr, "counts", true, 1, 60);
    if (!c) return std::nullopt;
    for (auto n : *c) out.counts.push_back(static_cast<int>(n));
    std::sort(out.counts.begin(), out.counts.end());
    out.counts.erase(std::unique(out.counts.begin(), out.counts.end()), out.counts.end());
  }
  return out;
}

Outputs run_entropy(const EntropyParams& p, const ExperimentConfig& c, unsigned) {
  Outputs out;
  Csv csv({"quantity", "value"});
  csv.cell("topological_entropy").cell(sofic::topological_entropy(c.space));
  csv.end_row();
  out.add("entropy.csv", csv.str());
  if (!p.counts.empty()) {
    Csv counts({"n", "count", "log_count_over_n"});
    for (int n : p.counts) {
      const std::uint64_t k = sofic::count_admissible(c.space, n);
      counts.cell(n).cell(k).cell(std::log(static_cast<double>(k)) / n);
      counts.end_row();
    }
    out.add("counts.csv", counts.str());
  }
  return out;
}

// ---- pressure and bowen

struct PressureParams {
  LocalPotential phi;
  std::vector<int> n;
  bool exact = true;
  carath::PressureOptions options;
};

std::optional<carath::PressureOptions> parse_pressure_options(const json& p,
                                                              const std::string& ptr,
                                                              Checker& chk) {
  carath::PressureOptions o;
  if (auto v = chk.integer(p, ptr, "max_window", false, 1, 16)) o.max_window = static_cast<int>(*v);
  if (auto v = chk.integer(p, ptr, "max_states", false, 1, 1 << 20)) {
    o.max_states = static_cast<std::size_t>(*v);
  }
  return o;
}

std::optional<PressureParams> parse_pressure(const json& p, const std::string& ptr,
                                             const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"window", "table", "n", "exact", "max_window", "max_states"});
  const std::size_t before = chk.count();
  auto phi = io::parse_potential(p, ptr, space, chk);
  std::vector<int> ns{8, 16, 24};
  if (p.contains("n")) {
    if (auto v = chk.integers(p, ptr, "n", true, 1, 64)) {
      ns.clear();
      for (auto x : *v) ns.push_back(static_cast<int>(x));
      std::sort(ns.begin(), ns.end());
      ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    }
  }
  const auto exact = chk.boolean(p, ptr, "exact", false);
  const auto options = parse_pressure_options(p, ptr, chk);
  if (chk.count() != before || !phi) return std::nullopt;
  return PressureParams{std::move(*phi), std::move(ns), exact.value_or(true), *options};
}

Outputs run_pressure(const PressureParams& p, const ExperimentConfig& c, unsigned threads) {
  std::vector<double> values(p.n.size());
  parallel_for(p.n.size(), threads, [&](std::size_t i) {
    values[i] = carath::pressure_partition(c.space, p.phi, p.n[i]);
  });
  Csv csv({"method", "n", "value"});
  for (std::size_t i = 0; i < p.n.size(); ++i) {
    csv.cell("partition").cell(p.n[i]).cell(values[i]);
    csv.end_row();
  }
  if (p.exact) {
    csv.cell("exact").cell("").cell(carath::pressure_exact(c.space, p.phi, p.options));
    csv.end_row();
  }
  Outputs out;
  out.add("pressure.csv", csv.str());
  return out;
}

struct BowenParams {
  LocalPotential u;
  carath::PressureOptions options;
};

std::optional<BowenParams> parse_bowen(const json& p, const std::string& ptr,
                                       const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"window", "table", "max_window", "max_states"});
  const std::size_t before = chk.count();
  auto u = io::parse_potential(p, ptr, space, chk);
  const auto options = parse_pressure_options(p, ptr, chk);
  if (chk.count() != before || !u) return std::nullopt;
  if (!(u->min_over(space) > 0.0)) {
    chk.fail(pointer_append(ptr, "table"), ViolationKind::kInvariant,
             "u must be positive on every admissible window");
    return std::nullopt;
  }
  return BowenParams{std::move(*u), *options};
}

Outputs run_bowen(const BowenParams& p, const ExperimentConfig& c, unsigned) {
  Csv csv({"quantity", "value"});
  csv.cell("topological_entropy").cell(sofic::topological_entropy(c.space));
  csv.end_row();
  csv.cell("bowen_dimension").cell(carath::bowen_dimension(c.space, p.u, p.options));
  csv.end_row();
  Outputs out;
  out.add("bowen.csv", csv.str());
  return out;
}

// ---- outer-measure sweep

struct SweepParams {
  carath::CStructure structure;
  std::vector<double> t;
  std::vector<int> depth_cap;
  std::vector<Word> target;
  bool block_cover = false;
  int m_blk = 1;
};

std::optional<std::vector<Word>> parse_target(const json& p, const std::string& ptr,
                                              const sofic::ShiftSpace& space, Checker& chk) {
  const json* t = chk.field(p, ptr, "target", false);
  if (t == nullptr) return std::vector<Word>{Word{}};
  const std::string at = pointer_append(ptr, "target");
  if (!t->is_array() || t->empty()) {
    chk.fail(at, ViolationKind::kSchema, "expected a non-empty array of words");
    return std::nullopt;
  }
  std::vector<Word> out;
  const std::size_t before = chk.count();
  for (std::size_t i = 0; i < t->size(); ++i) {
    const std::string ai = pointer_append(at, std::to_string(i));
    if (auto w = io::parse_word((*t)[i], ai, space.alphabet_size(), chk)) {
      if (admissible_word(*w, space, ai, chk)) out.push_back(std::move(*w));
    }
  }
  if (chk.count() != before) return std::nullopt;
  return out;
}

std::optional<SweepParams> parse_sweep(const json& p, const std::string& ptr,
                                       const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"structure", "t", "depth_cap", "target", "measure", "m_blk"});
  const std::size_t before = chk.count();
  std::optional<carath::CStructure> s;
  if (const json* sv = chk.field(p, ptr, "structure", true)) {
    s = io::parse_structure(*sv, pointer_append(ptr, "structure"), space, chk);
  }
  auto t = chk.reals(p, ptr, "t", true, 0.0, 1e6);
  auto caps = chk.integers(p, ptr, "depth_cap", true, 0, 64);
  auto target = parse_target(p, ptr, space, chk);
  const auto measure = chk.string(p, ptr, "measure", false).value_or("M");
  if (measure != "M" && measure != "N") {
    chk.fail(pointer_append(ptr, "measure"), ViolationKind::kSchema, "expected \"M\" or \"N\"");
  }
  const auto m_blk = chk.integer(p, ptr, "m_blk", measure == "N", 1, 64);
  if (chk.count() != before || !s || !t || !caps || !target) return std::nullopt;
  SweepParams out{std::move(*s), std::move(*t), {}, std::move(*target), measure == "N",
                  static_cast<int>(m_blk.value_or(1))};
  for (auto d : *caps) out.depth_cap.push_back(static_cast<int>(d));
  std::sort(out.t.begin(), out.t.end());
  out.t.erase(std::unique(out.t.begin(), out.t.end()), out.t.end());
  std::sort(out.depth_cap.begin(), out.depth_cap.end());
  out.depth_cap.erase(std::unique(out.depth_cap.begin(), out.depth_cap.end()),
                      out.depth_cap.end());
  return out;
}

Outputs run_sweep(const SweepParams& p, const ExperimentConfig&, unsigned threads) {
  const std::size_t cols = p.depth_cap.size();
  std::vector<double> values(p.t.size() * cols);
  // Grid points run concurrently; rows are written in grid order.
  parallel_for(values.size(), threads, [&](std::size_t k) {
    const double t = p.t[k / cols];
    const int cap = p.depth_cap[k % cols];
    values[k] = p.block_cover ? carath::outer_measure_N(p.structure, p.target, t, p.m_blk, cap)
                              : carath::outer_measure_M(p.structure, p.target, t, cap);
  });
  Csv csv({"t", "depth_cap", "value"});
  for (std::size_t k = 0; k < values.size(); ++k) {
    csv.cell(p.t[k / cols]).cell(p.depth_cap[k % cols]).cell(values[k]);
    csv.end_row();
  }
  Outputs out;
  out.add("outer_sweep.csv", csv.str());
  return out;
}

// ---- construction

struct ConstructParams {
  construct::MeasureFamily family;
  construct::PlanOptions plan;
  construct::OrbitOptions orbit;
};

const std::vector<std::string_view> kConstructKeys{
    "measures", "dims",   "max_level", "eps_tilde",        "eps_hat", "net_mesh", "gamma_n",
    "gamma",    "filter", "typical",   "max_group_length", "net_cap"};

std::vector<std::string_view> with_construct_keys(std::vector<std::string_view> extra) {
  extra.insert(extra.end(), kConstructKeys.begin(), kConstructKeys.end());
  return extra;
}

std::optional<ConstructParams> parse_construct_fields(const json& p, const std::string& ptr,
                                                      const sofic::ShiftSpace& space,
                                                      Checker& chk) {
  const std::size_t before = chk.count();
  std::vector<measures::MarkovMeasure> ms;
  if (const json* mv = chk.field(p, ptr, "measures", true)) {
    const std::string at = pointer_append(ptr, "measures");
    if (!mv->is_array() || mv->empty()) {
      chk.fail(at, ViolationKind::kSchema, "expected a non-empty array of measures");
    } else {
      for (std::size_t i = 0; i < mv->size(); ++i) {
        if (auto mu = io::parse_measure((*mv)[i], pointer_append(at, std::to_string(i)), space, chk)) {
          ms.push_back(std::move(*mu));
        }
      }
    }
  }
  const auto max_level = chk.integer(p, ptr, "max_level", true, 0, 16);
  if (max_level && !ms.empty() && static_cast<std::size_t>(*max_level) + 1 > ms.size()) {
    chk.fail(pointer_append(ptr, "max_level"), ViolationKind::kInvariant,
             "level " + std::to_string(*max_level) + " needs " + std::to_string(*max_level + 1) +
                 " measures, got " + std::to_string(ms.size()));
  }
  const std::size_t levels = max_level ? static_cast<std::size_t>(*max_level) + 1 : 0;
  auto per_level = [&](std::string_view key, double lo, double hi, bool open_lo) {
    std::vector<double> out;
    if (!p.contains(std::string(key))) return out;
    if (auto v = chk.reals(p, ptr, key, true, lo, hi, open_lo)) {
      if (levels > 0 && v->size() != levels) {
        chk.fail(pointer_append(ptr, key), ViolationKind::kSchema,
                 "expected one entry per level 0.." + std::to_string(levels - 1));
      }
      out = std::move(*v);
    }
    return out;
  };
  std::optional<std::vector<double>> dims;
  if (p.contains("dims")) {
    dims = chk.reals(p, ptr, "dims", true, 0.0, 1e6);
    if (dims && dims->size() != ms.size()) {
      chk.fail(pointer_append(ptr, "dims"), ViolationKind::kSchema, "expected one per measure");
    }
  }
  ConstructParams out;
  out.plan.eps_tilde = per_level("eps_tilde", 0.0, 1e6, true);
  out.plan.eps_hat = per_level("eps_hat", 0.0, 1.0, true);
  out.plan.net_mesh = per_level("net_mesh", 0.0, 1e6, true);
  if (const json* g = chk.field(p, ptr, "gamma_n", false)) {
    const std::string at = pointer_append(ptr, "gamma_n");
    std::vector<std::vector<std::size_t>> table;
    if (!g->is_array() || (levels > 0 && g->size() != levels)) {
      chk.fail(at, ViolationKind::kSchema, "expected one row per level");
    } else {
      for (std::size_t l = 0; l < g->size(); ++l) {
        const json& row = (*g)[l];
        const std::string rl = pointer_append(at, std::to_string(l));
        std::vector<std::size_t> r;
        if (!row.is_array() || row.size() != l + 1) {
          chk.fail(rl, ViolationKind::kSchema, "level " + std::to_string(l) + " needs " +
                                                   std::to_string(l + 1) + " thresholds");
          continue;
        }
        for (const json& x : row) {
          if (!x.is_number_integer() || x.get<std::int64_t>() <= 0) {
            chk.fail(rl, ViolationKind::kSchema, "thresholds must be positive integers");
            break;
          }
          r.push_back(x.get<std::size_t>());
        }
        table.push_back(std::move(r));
      }
    }
    out.plan.gamma_n = std::move(table);
  }
  if (const json* g = chk.field(p, ptr, "gamma", false)) {
    const std::string at = pointer_append(ptr, "gamma");
    if (chk.object(*g, at)) {
      chk.only(*g, at, {"samples", "cap", "depth"});
      if (auto v = chk.integer(*g, at, "samples", false, 1, 1 << 20)) {
        out.plan.gamma.samples = static_cast<std::size_t>(*v);
      }
      if (auto v = chk.integer(*g, at, "cap", false, 1, std::int64_t{1} << 40)) {
        out.plan.gamma.cap = static_cast<std::size_t>(*v);
      }
      if (auto v = chk.integer(*g, at, "depth", false, 1, 16)) out.plan.gamma.depth = static_cast<int>(*v);
    }
  }
  if (const json* t = chk.field(p, ptr, "typical", false)) {
    const std::string at = pointer_append(ptr, "typical");
    if (chk.object(*t, at)) {
      chk.only(*t, at, {"depth", "max_attempts"});
      if (auto v = chk.integer(*t, at, "depth", false, 1, 16)) {
        out.orbit.typical.depth = static_cast<int>(*v);
      }
      if (auto v = chk.integer(*t, at, "max_attempts", false, 1, 1 << 24)) {
        out.orbit.typical.max_attempts = static_cast<std::size_t>(*v);
      }
    }
  }
  if (const json* f = chk.field(p, ptr, "filter", false)) {
    const std::string at = pointer_append(ptr, "filter");
    if (chk.object(*f, at)) {
      chk.only(*f, at, {"window", "table", "threshold"});
      auto u = io::parse_potential(*f, at, space, chk);
      auto threshold = chk.real(*f, at, "threshold", true, -1e300, 1e300);
      if (u && threshold) out.plan.filter = construct::DimFilter{std::move(*u), *threshold};
    }
  }
  if (auto v = chk.integer(p, ptr, "max_group_length", false, 1, std::int64_t{1} << 50)) {
    out.plan.schedule.max_group_length = static_cast<std::size_t>(*v);
  }
  if (auto v = chk.integer(p, ptr, "net_cap", false, 1, 1 << 24)) {
    out.plan.net_cap = static_cast<std::size_t>(*v);
  }
  if (chk.count() != before || !max_level) return std::nullopt;
  out.plan.max_level = static_cast<int>(*max_level);
  out.orbit.filter = out.plan.filter;
  std::vector<double> d;
  if (dims) {
    d = *dims;
  } else {
    for (const auto& mu : ms) d.push_back(measures::measure_entropy(mu));
  }
  try {
    out.family = construct::make_family(std::move(ms), std::move(d));
  } catch (const Error& e) {
    chk.fail(pointer_append(ptr, "measures"), ViolationKind::kInvariant, e.detail());
    return std::nullopt;
  }
  return out;
}

struct Built {
  construct::Itinerary itinerary;
  construct::ConstructedOrbit orbit;
};

Built build(const ConstructParams& p, const ExperimentConfig& c, unsigned threads, Outputs& out) {
  construct::PlanOptions plan = p.plan;
  plan.threads = threads;
  plan.gamma.seed = Rng::mix(c.seed, kGammaStream);
  construct::OrbitOptions orbit = p.orbit;
  orbit.threads = threads;
  const std::uint64_t orbit_seed = Rng::mix(c.seed, kOrbitStream);
  out.seeds["config"] = c.seed;
  out.seeds["gamma"] = plan.gamma.seed;
  out.seeds["orbit"] = orbit_seed;
  Built b{construct::plan_itinerary(p.family, plan), {}};
  b.orbit = construct::build_orbit(b.itinerary, p.family, c.space, orbit_seed, orbit);
  return b;
}

std::optional<ConstructParams> parse_construct(const json& p, const std::string& ptr,
                                               const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, kConstructKeys);
  return parse_construct_fields(p, ptr, space, chk);
}

Outputs run_construct(const ConstructParams& p, const ExperimentConfig& c, unsigned threads) {
  Outputs out;
  const Built b = build(p, c, threads, out);
  out.add("itinerary.json", pretty(io::to_json(b.itinerary)));
  out.add("orbit.json", pretty(io::to_json(b.orbit)));
  out.add("orbit.bin", io::orbit_bytes(b.orbit.word));
  return out;
}

struct SaturateParams {
  ConstructParams construct;
  int level = 0;
  double slack = 0.05;
  int depth = 8;
};

std::optional<SaturateParams> parse_saturate(const json& p, const std::string& ptr,
                                             const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, with_construct_keys({"level", "slack", "depth"}));
  const std::size_t before = chk.count();
  auto cp = parse_construct_fields(p, ptr, space, chk);
  const auto level = chk.integer(p, ptr, "level", false, 1, 16);
  const auto slack = chk.real(p, ptr, "slack", false, 0.0, 1e6);
  const auto depth = chk.integer(p, ptr, "depth", false, 1, 16);
  if (chk.count() != before || !cp) return std::nullopt;
  SaturateParams out{std::move(*cp), static_cast<int>(level.value_or(cp->plan.max_level)),
                     slack.value_or(0.05), static_cast<int>(depth.value_or(8))};
  if (out.level < 1 || out.level > out.construct.plan.max_level) {
    chk.fail(pointer_append(ptr, "level"), ViolationKind::kInvariant,
             "level must lie in 1..max_level");
    return std::nullopt;
  }
  return out;
}

Outputs run_saturate(const SaturateParams& p, const ExperimentConfig& c, unsigned threads) {
  Outputs out;
  const Built b = build(p.construct, c, threads, out);
  const auto& net = b.itinerary.nets[static_cast<std::size_t>(p.level)];
  const auto report = construct::verify_saturation(b.orbit, b.itinerary, net,
                                                   p.construct.family, p.slack, p.depth);
  std::vector<std::string> header{"node"};
  for (int l = 0; l <= p.level; ++l) header.push_back("w" + std::to_string(l));
  for (const char* h : {"reachable", "distance", "time", "pass"}) header.emplace_back(h);
  Csv csv(header);
  for (std::size_t i = 0; i < report.nodes.size(); ++i) {
    const auto& n = report.nodes[i];
    csv.cell(std::uint64_t{i});
    for (double w : n.weights) csv.cell(w);
    csv.cell(n.reachable ? 1 : 0).cell(n.distance).cell(std::uint64_t{n.time}).cell(n.pass ? 1 : 0);
    csv.end_row();
  }
  out.add("saturation.csv", csv.str());
  out.add("saturation.json", pretty(json{{"level", report.level},
                                         {"threshold", report.threshold},
                                         {"truncation_bound", report.truncation_bound},
                                         {"slack", p.slack},
                                         {"depth", p.depth},
                                         {"orbit_length", b.orbit.word.size()},
                                         {"pass", report.pass}}));
  return out;
}

// ---- emergence

struct EmergenceParams {
  enum class Source { kGeneric, kOscillating, kConstruct, kFile } source = Source::kGeneric;
  std::optional<measures::MarkovMeasure> a;
  std::optional<measures::MarkovMeasure> b;
  std::size_t length = 0;
  std::size_t first_block = 0;
  double ratio = 2.0;
  std::optional<ConstructParams> construct;
  std::string path;
  int depth = 6;
  std::size_t count = 64;
  std::optional<std::size_t> n_min;
  std::optional<std::size_t> n_max;
  std::vector<double> eps;
  double tail_fraction = 0.5;
  std::size_t exact_limit = 24;
  bool dump_final_snapshot = false;
};

std::optional<EmergenceParams> parse_emergence(const json& p, const std::string& ptr,
                                               const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"source", "depth", "count", "n_min", "n_max", "eps", "tail_fraction",
                    "exact_limit", "dump_final_snapshot"});
  const std::size_t before = chk.count();
  EmergenceParams out;
  if (const json* s = chk.field(p, ptr, "source", true)) {
    const std::string at = pointer_append(ptr, "source");
    if (chk.object(*s, at)) {
      const auto type = chk.string(*s, at, "type", true);
      constexpr std::int64_t kMaxLength = std::int64_t{1} << 36;
      if (type == "generic") {
        out.source = EmergenceParams::Source::kGeneric;
        chk.only(*s, at, {"type", "measure", "length"});
        if (const json* m = chk.field(*s, at, "measure", true)) {
          out.a = io::parse_measure(*m, pointer_append(at, "measure"), space, chk);
        }
        out.length = static_cast<std::size_t>(chk.integer(*s, at, "length", true, 1, kMaxLength).value_or(0));
      } else if (type == "oscillating") {
        out.source = EmergenceParams::Source::kOscillating;
        chk.only(*s, at, {"type", "a", "b", "first_block", "ratio", "length"});
        if (const json* m = chk.field(*s, at, "a", true)) {
          out.a = io::parse_measure(*m, pointer_append(at, "a"), space, chk);
        }
        if (const json* m = chk.field(*s, at, "b", true)) {
          out.b = io::parse_measure(*m, pointer_append(at, "b"), space, chk);
        }
        out.first_block = static_cast<std::size_t>(
            chk.integer(*s, at, "first_block", true, 1, kMaxLength).value_or(0));
        out.ratio = chk.real(*s, at, "ratio", true, 1.0, 1e6, true).value_or(2.0);
        out.length = static_cast<std::size_t>(chk.integer(*s, at, "length", true, 1, kMaxLength).value_or(0));
      } else if (type == "construct") {
        out.source = EmergenceParams::Source::kConstruct;
        chk.only(*s, at, with_construct_keys({"type"}));
        out.construct = parse_construct_fields(*s, at, space, chk);
      } else if (type == "file") {
        out.source = EmergenceParams::Source::kFile;
        chk.only(*s, at, {"type", "path"});
        out.path = chk.string(*s, at, "path", true).value_or("");
        if (!out.path.empty() && !fs::is_regular_file(out.path)) {
          chk.fail(pointer_append(at, "path"), ViolationKind::kInvariant,
                   "no orbit file at " + out.path);
        }
      } else if (type) {
        chk.fail(pointer_append(at, "type"), ViolationKind::kSchema,
                 "unknown source type '" + *type + "' (generic, oscillating, construct, file)");
      }
    }
  }
  out.depth = static_cast<int>(
      chk.integer(p, ptr, "depth", false, 1, measures::max_code_depth(space.alphabet_size()))
          .value_or(6));
  out.count = static_cast<std::size_t>(chk.integer(p, ptr, "count", false, 2, 100000).value_or(64));
  if (auto v = chk.integer(p, ptr, "n_min", false, 1, std::int64_t{1} << 40)) {
    out.n_min = static_cast<std::size_t>(*v);
  }
  if (auto v = chk.integer(p, ptr, "n_max", false, 1, std::int64_t{1} << 40)) {
    out.n_max = static_cast<std::size_t>(*v);
  }
  if (out.n_min && out.n_max && *out.n_min > *out.n_max) {
    chk.fail(pointer_append(ptr, "n_min"), ViolationKind::kInvariant, "n_min exceeds n_max");
  }
  if (auto v = chk.reals(p, ptr, "eps", true, 0.0, 1e6, true)) out.eps = std::move(*v);
  out.tail_fraction = chk.real(p, ptr, "tail_fraction", false, 0.0, 1.0, true).value_or(0.5);
  out.exact_limit = static_cast<std::size_t>(chk.integer(p, ptr, "exact_limit", false, 0, 24).value_or(24));
  out.dump_final_snapshot = chk.boolean(p, ptr, "dump_final_snapshot", false).value_or(false);
  if (chk.count() != before) return std::nullopt;
  std::sort(out.eps.begin(), out.eps.end(), std::greater<>());
  out.eps.erase(std::unique(out.eps.begin(), out.eps.end()), out.eps.end());
  return out;
}

Outputs run_emergence(const EmergenceParams& p, const ExperimentConfig& c, unsigned threads) {
  Outputs out;
  Word word;
  const std::uint64_t source_seed = Rng::mix(c.seed, kSourceStream);
  switch (p.source) {
    case EmergenceParams::Source::kGeneric:
      out.seeds["config"] = c.seed;
      out.seeds["source"] = source_seed;
      word = measures::sample_generic(*p.a, p.length, source_seed);
      break;
    case EmergenceParams::Source::kOscillating:
      out.seeds["config"] = c.seed;
      out.seeds["source"] = source_seed;
      word = construct::oscillating_orbit(*p.a, *p.b, p.first_block, p.ratio, p.length, source_seed);
      break;
    case EmergenceParams::Source::kConstruct:
      word = build(*p.construct, c, threads, out).orbit.word;
      break;
    case EmergenceParams::Source::kFile:
      word = io::read_orbit_file(p.path, c.space);
      break;
  }
  if (word.size() < static_cast<std::size_t>(p.depth) + 1) {
    throw Error(ErrorKind::kDepth, "emergence", "emergence_estimate",
                "orbit of length " + size_text(word.size()) + " is too short for depth " +
                    std::to_string(p.depth));
  }
  const std::size_t usable = word.size() - static_cast<std::size_t>(p.depth) + 1;
  const std::size_t n_max = p.n_max.value_or(usable);
  const std::size_t n_min = p.n_min.value_or(1);
  const auto cloud = pointwise::build_cloud(word, n_min, n_max, p.count, p.depth, c.space);
  pointwise::CoverOptions cover;
  cover.exact_limit = p.exact_limit;
  const auto report = pointwise::emergence_estimate(cloud, p.eps, p.tail_fraction, threads, cover);
  out.add("emergence.csv", io::emergence_csv(report));
  json fit = io::emergence_json(report);
  fit["orbit_length"] = word.size();
  fit["depth"] = p.depth;
  fit["snapshots"] = cloud.times.size();
  out.add("emergence_fit.json", pretty(fit));
  if (p.dump_final_snapshot) out.add("final_snapshot.csv", io::finsupp_csv(cloud.snapshots.back()));
  return out;
}

// ---- conditions

struct ConditionsParams {
  carath::CStructure structure;
  int depth;
  std::vector<double> t_grid;
  carath::ConditionOptions options;
};

std::optional<ConditionsParams> parse_conditions(const json& p, const std::string& ptr,
                                                 const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"structure", "depth", "t_grid", "max_depth", "extra_depth",
                    "cylinder_depth", "max_cylinders", "max_m"});
  const std::size_t before = chk.count();
  std::optional<carath::CStructure> s;
  if (const json* sv = chk.field(p, ptr, "structure", true)) {
    s = io::parse_structure(*sv, pointer_append(ptr, "structure"), space, chk);
  }
  carath::ConditionOptions o;
  const auto depth = chk.integer(p, ptr, "depth", true, 1, 64);
  auto grid = chk.reals(p, ptr, "t_grid", true, 0.0, 1e6);
  if (auto v = chk.integer(p, ptr, "max_depth", false, 1, 64)) o.max_depth = static_cast<int>(*v);
  if (auto v = chk.integer(p, ptr, "extra_depth", false, 0, 32)) o.extra_depth = static_cast<int>(*v);
  if (auto v = chk.integer(p, ptr, "cylinder_depth", false, 0, 32)) {
    o.cylinder_depth = static_cast<int>(*v);
  }
  if (auto v = chk.integer(p, ptr, "max_cylinders", false, 1, 1 << 24)) {
    o.max_cylinders = static_cast<std::size_t>(*v);
  }
  if (auto v = chk.integer(p, ptr, "max_m", false, 1, 64)) o.max_m = static_cast<int>(*v);
  if (chk.count() != before || !s || !depth || !grid) return std::nullopt;
  std::sort(grid->begin(), grid->end());
  grid->erase(std::unique(grid->begin(), grid->end()), grid->end());
  return ConditionsParams{std::move(*s), static_cast<int>(*depth), std::move(*grid), o};
}

Outputs run_conditions(const ConditionsParams& p, const ExperimentConfig&, unsigned) {
  const auto r = carath::check_conditions(p.structure, p.depth, p.t_grid, p.options);
  Csv csv({"t", "m_of_t"});
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    csv.cell(r.t_grid[i]).cell(r.m_of_t[i]);
    csv.end_row();
  }
  Outputs out;
  out.add("conditions.csv", csv.str());
  out.add("conditions.json", pretty(json{{"kind", std::string(carath::to_string(p.structure.kind()))},
                                         {"depth", r.depth},
                                         {"cylinder_depth", r.cylinder_depth},
                                         {"dimension", r.dimension},
                                         {"q1_estimate", r.q1_estimate},
                                         {"q3_estimate", r.q3_estimate},
                                         {"c1", r.c1},
                                         {"c2", r.c2},
                                         {"c3", r.c3},
                                         {"c4", r.c4}}));
  return out;
}

// ---- restricted probe

struct ProbeParams {
  carath::CStructure structure;
  Word z;
  measures::MarkovMeasure mu;
  std::size_t n;
  double eps;
  double t;
  int m_blk;
  int depth_cap;
  carath::RestrictedOptions options;
};

std::optional<ProbeParams> parse_probe(const json& p, const std::string& ptr,
                                       const sofic::ShiftSpace& space, Checker& chk) {
  chk.only(p, ptr, {"structure", "z", "measure", "n", "eps", "t", "m_blk", "depth_cap", "depth",
                    "strict", "max_tested"});
  const std::size_t before = chk.count();
  std::optional<carath::CStructure> s;
  if (const json* sv = chk.field(p, ptr, "structure", true)) {
    s = io::parse_structure(*sv, pointer_append(ptr, "structure"), space, chk);
  }
  std::optional<Word> z = Word{};
  if (const json* zv = chk.field(p, ptr, "z", false)) {
    const std::string at = pointer_append(ptr, "z");
    z = io::parse_word(*zv, at, space.alphabet_size(), chk);
    if (z && !admissible_word(*z, space, at, chk)) z.reset();
  }
  std::optional<measures::MarkovMeasure> mu;
  if (const json* mv = chk.field(p, ptr, "measure", true)) {
    mu = io::parse_measure(*mv, pointer_append(ptr, "measure"), space, chk);
  }
  const auto n = chk.integer(p, ptr, "n", true, 1, 1 << 20);
  const auto eps = chk.real(p, ptr, "eps", true, 0.0, 1e6, true);
  const auto t = chk.real(p, ptr, "t", true, 0.0, 1e6);
  const auto m_blk = chk.integer(p, ptr, "m_blk", false, 1, 64);
  const auto cap = chk.integer(p, ptr, "depth_cap", true, 1, 64);
  carath::RestrictedOptions o;
  if (auto v = chk.integer(p, ptr, "depth", false, 1, 16)) o.depth = static_cast<int>(*v);
  if (auto v = chk.boolean(p, ptr, "strict", false)) o.strict = *v;
  if (auto v = chk.integer(p, ptr, "max_tested", false, 1, std::int64_t{1} << 32)) {
    o.max_tested = static_cast<std::size_t>(*v);
  }
  if (chk.count() != before || !s || !z || !mu || !n || !eps || !t || !cap) return std::nullopt;
  return ProbeParams{std::move(*s), std::move(*z), std::move(*mu), static_cast<std::size_t>(*n),
                     *eps, *t, static_cast<int>(m_blk.value_or(1)), static_cast<int>(*cap), o};
}

Outputs run_probe(const ProbeParams& p, const ExperimentConfig& c, unsigned threads) {
  Outputs out;
  carath::RestrictedOptions o = p.options;
  o.threads = threads;
  o.seed = Rng::mix(c.seed, kProbeStream);
  out.seeds["config"] = c.seed;
  out.seeds["probe"] = o.seed;
  const auto r = carath::restricted_outer_measure(p.structure, p.z, p.mu, p.n, p.eps, p.t,
                                                  p.m_blk, p.depth_cap, o);
  Csv csv({"value", "tested", "survivors"});
  csv.cell(r.value).cell(std::uint64_t{r.tested}).cell(std::uint64_t{r.survivors});
  csv.end_row();
  out.add("restricted_probe.csv", csv.str());
  return out;
}

// ---- dispatch

struct Experiment {
  std::string_view name;
  // Validates the parameters; true when they are usable.
  std::function<bool(const json&, const sofic::ShiftSpace&, Checker&)> check;
  std::function<Outputs(const ExperimentConfig&, unsigned)> run;
};

template <class Params>
Experiment make_experiment(
    std::string_view name,
    std::optional<Params> (*parse)(const json&, const std::string&, const sofic::ShiftSpace&,
                                   Checker&),
    Outputs (*exec)(const Params&, const ExperimentConfig&, unsigned)) {
  return Experiment{
      name,
      [parse](const json& p, const sofic::ShiftSpace& space, Checker& chk) {
        return parse(p, "/parameters", space, chk).has_value();
      },
      [parse, exec](const ExperimentConfig& c, unsigned threads) {
        Checker chk;
        auto params = parse(c.parameters, "/parameters", c.space, chk);
        if (!params) throw config_error(chk.violations());
        return exec(*params, c, threads);
      }};
}

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> all{
      make_experiment<EntropyParams>("entropy", parse_entropy, run_entropy),
      make_experiment<PressureParams>("pressure", parse_pressure, run_pressure),
      make_experiment<BowenParams>("bowen", parse_bowen, run_bowen),
      make_experiment<SweepParams>("outer-sweep", parse_sweep, run_sweep),
      make_experiment<EmergenceParams>("emergence", parse_emergence, run_emergence),
      make_experiment<ConstructParams>("construct", parse_construct, run_construct),
      make_experiment<SaturateParams>("saturate", parse_saturate, run_saturate),
      make_experiment<ConditionsParams>("conditions", parse_conditions, run_conditions),
      make_experiment<ProbeParams>("restricted-probe", parse_probe, run_probe),
  };
  return all;
}

const Experiment* find_experiment(std::string_view name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

// ---- output staging

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomic(const fs::path& target, const std::string& body) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::kIo, kModule, "write", "cannot open " + tmp.string());
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::kIo, kModule, "write", "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kIo, kModule, "write", "cannot rename into " + target.string());
  }
}

// Removes outputs of an earlier run recorded in dir/manifest.json, the
// manifest itself and any error file.
void clear_previous(const fs::path& dir) {
  std::error_code ec;
  const fs::path manifest = dir / kManifest;
  if (fs::exists(manifest, ec)) {
    std::ifstream in(manifest);
    const json m = json::parse(in, nullptr, false);
    if (m.is_object() && m.contains("files") && m["files"].is_array()) {
      for (const json& f : m["files"]) {
        if (!f.is_string()) continue;
        const fs::path name = f.get<std::string>();
        // Only plain file names are ours to delete.
        if (name.has_parent_path() || name.is_absolute()) continue;
        fs::remove(dir / name, ec);
      }
    }
    fs::remove(manifest, ec);
  }
  fs::remove(dir / kErrorFile, ec);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, kModule, "run", "cannot create output directory " + dir.string());
  }
}

void commit(const fs::path& dir, const Outputs& out, const RunManifest& manifest) {
  ensure_dir(dir);
  clear_previous(dir);
  std::vector<fs::path> written;
  try {
    for (const auto& [name, body] : out.files) {
      write_atomic(dir / name, body);
      written.push_back(dir / name);
    }
    write_atomic(dir / kManifest, pretty(manifest.to_json()));
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

}  // namespace

const std::vector<std::string_view>& experiment_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> v;
    for (const auto& e : experiments()) v.push_back(e.name);
    return v;
  }();
  return names;
}

Validation validate_config(const json& document) {
  Checker chk;
  Validation out;
  if (!chk.object(document, "")) {
    out.violations = chk.violations();
    return out;
  }
  chk.only(document, "", {"space", "experiment", "parameters", "seed", "output_dir"});
  std::optional<sofic::ShiftSpace> space;
  if (const json* s = chk.field(document, "", "space", true)) {
    space = io::parse_space(*s, "/space", chk);
  }
  const auto name = chk.string(document, "", "experiment", true);
  const Experiment* exp = nullptr;
  if (name) {
    exp = find_experiment(*name);
    if (exp == nullptr) {
      std::string list;
      for (auto n : experiment_names()) list += (list.empty() ? "" : ", ") + std::string(n);
      chk.fail("/experiment", ViolationKind::kSchema,
               "unknown experiment '" + *name + "' (" + list + ")");
    }
  }
  const auto seed = chk.unsigned64(document, "", "seed", false);
  const auto dir = chk.string(document, "", "output_dir", false);
  json params = json::object();
  if (const json* p = chk.field(document, "", "parameters", false)) {
    if (chk.object(*p, "/parameters")) params = *p;
  }
  // Parameters are checked even when the space failed, against a stand-in;
  // only missing and unknown members are reported in that case.
  if (exp != nullptr && params.is_object()) {
    const sofic::ShiftSpace probe_space = space ? *space : sofic::ShiftSpace::full_shift(2);
    Checker param_chk;
    exp->check(params, probe_space, param_chk);
    for (const auto& v : param_chk.violations()) {
      const bool structural = v.message.starts_with("required member") ||
                              v.message.starts_with("unknown member");
      if (space || structural) chk.fail(v.pointer, v.kind, v.message);
    }
  }
  out.violations = chk.violations();
  if (chk.ok()) {
    out.config = ExperimentConfig{document, *space, *name, params, seed.value_or(0), dir};
  }
  return out;
}

Validation validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return Validation{std::nullopt,
                      {{"", ViolationKind::kParse, "cannot read " + path.string()}}};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  json document;
  try {
    document = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    return Validation{std::nullopt, {{"", ViolationKind::kParse, e.what()}}};
  }
  return validate_config(document);
}

Error config_error(const std::vector<io::ConfigViolation>& violations) {
  std::string detail;
  for (const auto& v : violations) {
    if (!detail.empty()) detail += '\n';
    detail += (v.pointer.empty() ? std::string("(root)") : v.pointer) + ": " +
              std::string(io::to_string(v.kind)) + ": " + v.message;
  }
  return Error(ErrorKind::kConfig, kModule, "validate_config", detail);
}

json violations_json(const std::vector<io::ConfigViolation>& violations) {
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"pointer", v.pointer},
                   {"kind", std::string(io::to_string(v.kind))},
                   {"message", v.message}});
  }
  return out;
}

json RunManifest::to_json() const {
  return json{{"artifact_version", version}, {"config_sha256", config_sha256},
              {"started", started},          {"finished", finished},
              {"files", files},              {"seeds", seeds}};
}

json error_json(const Error& e) {
  return json{{"module", e.module()},
              {"operation", e.operation()},
              {"kind", std::string(to_string(e.kind()))},
              {"detail", e.detail()}};
}

void write_error(const std::filesystem::path& dir, const Error& e) {
  ensure_dir(dir);
  clear_previous(dir);
  write_atomic(dir / kErrorFile, pretty(error_json(e)));
}

RunManifest run(const ExperimentConfig& config, const RunOptions& options) {
  std::optional<fs::path> dir = options.out_dir;
  if (!dir && config.output_dir) dir = fs::path(*config.output_dir);
  if (!dir) {
    throw Error(ErrorKind::kConfig, kModule, "run",
                "no output directory: set output_dir or pass --out");
  }
  RunManifest manifest;
  manifest.version = std::string(kArtifactVersion);
  manifest.config_sha256 = io::sha256_hex(config.document.dump());
  manifest.started = utc_now();
  try {
    const Experiment* exp = find_experiment(config.experiment);
    if (exp == nullptr) {
      throw Error(ErrorKind::kConfig, kModule, "run", "unknown experiment " + config.experiment);
    }
    Outputs out = exp->run(config, std::max(1u, options.threads));
    for (const auto& [name, body] : out.files) manifest.files.push_back(name);
    manifest.seeds = out.seeds;
    if (manifest.seeds.empty()) manifest.seeds["config"] = config.seed;
    manifest.finished = utc_now();
    commit(*dir, out, manifest);
  } catch (const Error& e) {
    write_error(*dir, e);
    throw;
  } catch (const fs::filesystem_error& e) {
    const Error wrapped(ErrorKind::kIo, kModule, "run", e.what());
    write_error(*dir, wrapped);
    throw wrapped;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorKind::kInput, kModule, "run", e.what());
    write_error(*dir, wrapped);
    throw wrapped;
  }
  return manifest;
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("EMERGENCE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0 || v > 4096) {
      throw Error(ErrorKind::kConfig, kModule, "resolve_threads",
                  "EMERGENCE_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    return static_cast<unsigned>(v);
  }
  return default_threads();
}

}  // namespace elab::cli
