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

#include "elab/cli/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "elab/error.hpp"

namespace elab::io {
namespace {

constexpr const char* kModule = "cli";

std::string describe_type(const json& v) {
  return std::string(v.type_name());
}

std::uint64_t ipow(int m, int k) {
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::uint64_t>(m);
  return r;
}

Word decode(std::uint64_t code, int m, int k) {
  Word w(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<Symbol>(code % static_cast<std::uint64_t>(m) + 1);
    code /= static_cast<std::uint64_t>(m);
  }
  return w;
}

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kParse: return "parse";
    case ViolationKind::kSchema: return "schema";
    case ViolationKind::kInvariant: return "invariant";
  }
  return "unknown";
}

std::string pointer_append(const std::string& base, std::string_view token) {
  std::string out = base;
  out += '/';
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

void Checker::fail(std::string pointer, ViolationKind kind, std::string message) {
  violations_.push_back({std::move(pointer), kind, std::move(message)});
}

bool Checker::object(const json& v, const std::string& ptr) {
  if (v.is_object()) return true;
  fail(ptr, ViolationKind::kSchema, "expected an object, got " + describe_type(v));
  return false;
}

const json* Checker::field(const json& obj, const std::string& ptr, std::string_view key,
                           bool required) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    if (required) {
      fail(pointer_append(ptr, key), ViolationKind::kSchema,
           "required member '" + std::string(key) + "' is missing");
    }
    return nullptr;
  }
  return &*it;
}

void Checker::only(const json& obj, const std::string& ptr,
                   const std::vector<std::string_view>& allowed) {
  if (!obj.is_object()) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      fail(pointer_append(ptr, it.key()), ViolationKind::kSchema,
           "unknown member '" + it.key() + "'");
    }
  }
}

std::optional<std::int64_t> Checker::integer(const json& obj, const std::string& ptr,
                                             std::string_view key, bool required,
                                             std::int64_t lo, std::int64_t hi) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, key);
  if (!v->is_number_integer()) {
    fail(at, ViolationKind::kSchema, "expected an integer, got " + describe_type(*v));
    return std::nullopt;
  }
  if (v->is_number_unsigned() &&
      v->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    fail(at, ViolationKind::kInvariant, "value out of range");
    return std::nullopt;
  }
  const auto x = v->get<std::int64_t>();
  if (x < lo || x > hi) {
    fail(at, ViolationKind::kInvariant,
         "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]");
    return std::nullopt;
  }
  return x;
}

std::optional<std::uint64_t> Checker::unsigned64(const json& obj, const std::string& ptr,
                                                 std::string_view key, bool required) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, key);
  if (!v->is_number_integer()) {
    fail(at, ViolationKind::kSchema, "expected an unsigned integer, got " + describe_type(*v));
    return std::nullopt;
  }
  if (!v->is_number_unsigned() && v->get<std::int64_t>() < 0) {
    fail(at, ViolationKind::kInvariant, "value must be non-negative");
    return std::nullopt;
  }
  return v->get<std::uint64_t>();
}

std::optional<double> Checker::real(const json& obj, const std::string& ptr, std::string_view key,
                                    bool required, double lo, double hi, bool open_lo) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, key);
  if (!v->is_number()) {
    fail(at, ViolationKind::kSchema, "expected a number, got " + describe_type(*v));
    return std::nullopt;
  }
  const auto x = v->get<double>();
  if (x < lo || x > hi || (open_lo && x == lo)) {
    fail(at, ViolationKind::kInvariant,
         "value " + format_real(x) + " outside " + (open_lo ? "(" : "[") + format_real(lo) +
             ", " + format_real(hi) + "]");
    return std::nullopt;
  }
  return x;
}

std::optional<bool> Checker::boolean(const json& obj, const std::string& ptr, std::string_view key,
                                     bool required) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  if (!v->is_boolean()) {
    fail(pointer_append(ptr, key), ViolationKind::kSchema,
         "expected a boolean, got " + describe_type(*v));
    return std::nullopt;
  }
  return v->get<bool>();
}

std::optional<std::string> Checker::string(const json& obj, const std::string& ptr,
                                           std::string_view key, bool required) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) {
    fail(pointer_append(ptr, key), ViolationKind::kSchema,
         "expected a string, got " + describe_type(*v));
    return std::nullopt;
  }
  return v->get<std::string>();
}

std::optional<std::vector<double>> Checker::reals(const json& obj, const std::string& ptr,
                                                  std::string_view key, bool required, double lo,
                                                  double hi, bool open_lo) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, key);
  if (!v->is_array() || v->empty()) {
    fail(at, ViolationKind::kSchema, "expected a non-empty array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  const std::size_t before = count();
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string ai = pointer_append(at, std::to_string(i));
    const json& x = (*v)[i];
    if (!x.is_number()) {
      fail(ai, ViolationKind::kSchema, "expected a number, got " + describe_type(x));
      continue;
    }
    const auto d = x.get<double>();
    if (d < lo || d > hi || (open_lo && d == lo)) {
      fail(ai, ViolationKind::kInvariant,
           "value " + format_real(d) + " outside " + (open_lo ? "(" : "[") + format_real(lo) +
               ", " + format_real(hi) + "]");
      continue;
    }
    out.push_back(d);
  }
  if (count() != before) return std::nullopt;
  return out;
}

std::optional<std::vector<std::int64_t>> Checker::integers(const json& obj, const std::string& ptr,
                                                           std::string_view key, bool required,
                                                           std::int64_t lo, std::int64_t hi) {
  const json* v = field(obj, ptr, key, required);
  if (v == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, key);
  if (!v->is_array() || v->empty()) {
    fail(at, ViolationKind::kSchema, "expected a non-empty array of integers");
    return std::nullopt;
  }
  std::vector<std::int64_t> out;
  const std::size_t before = count();
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string ai = pointer_append(at, std::to_string(i));
    const json& x = (*v)[i];
    if (!x.is_number_integer() ||
        (x.is_number_unsigned() &&
         x.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))) {
      fail(ai, ViolationKind::kSchema, "expected an integer, got " + describe_type(x));
      continue;
    }
    const auto d = x.get<std::int64_t>();
    if (d < lo || d > hi) {
      fail(ai, ViolationKind::kInvariant,
           "value " + std::to_string(d) + " outside [" + std::to_string(lo) + ", " +
               std::to_string(hi) + "]");
      continue;
    }
    out.push_back(d);
  }
  if (count() != before) return std::nullopt;
  return out;
}

std::optional<Word> parse_word(const json& v, const std::string& ptr, int m, Checker& chk) {
  Word w;
  auto symbol_ok = [&](long long s) {
    if (s < 1 || s > m) {
      chk.fail(ptr, ViolationKind::kInvariant,
               "symbol " + std::to_string(s) + " outside 1.." + std::to_string(m));
      return false;
    }
    w.push_back(static_cast<Symbol>(s));
    return true;
  };
  if (v.is_array()) {
    for (const json& x : v) {
      if (!x.is_number_integer()) {
        chk.fail(ptr, ViolationKind::kSchema, "word entries must be integers");
        return std::nullopt;
      }
      if (!symbol_ok(x.get<long long>())) return std::nullopt;
    }
    return w;
  }
  if (!v.is_string()) {
    chk.fail(ptr, ViolationKind::kSchema, "expected a word (array or string)");
    return std::nullopt;
  }
  const auto& s = v.get_ref<const std::string&>();
  if (s.find(',') != std::string::npos) {
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t next = std::min(s.find(',', pos), s.size());
      long long x = 0;
      auto [p, ec] = std::from_chars(s.data() + pos, s.data() + next, x);
      if (ec != std::errc() || p != s.data() + next) {
        chk.fail(ptr, ViolationKind::kSchema, "malformed word '" + s + "'");
        return std::nullopt;
      }
      if (!symbol_ok(x)) return std::nullopt;
      pos = next + 1;
    }
    return w;
  }
  if (!s.empty() && m > 9) {
    chk.fail(ptr, ViolationKind::kSchema,
             "digit-string words need m <= 9; separate symbols with commas");
    return std::nullopt;
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      chk.fail(ptr, ViolationKind::kSchema, "malformed word '" + s + "'");
      return std::nullopt;
    }
    if (!symbol_ok(c - '0')) return std::nullopt;
  }
  return w;
}

std::string word_key(std::span<const Symbol> word, int m) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (m > 9 && i > 0) out += ',';
    out += std::to_string(static_cast<int>(word[i]));
  }
  return out;
}

std::optional<sofic::ShiftSpace> parse_space(const json& v, const std::string& ptr, Checker& chk) {
  if (!chk.object(v, ptr)) return std::nullopt;
  const std::size_t before = chk.count();
  chk.only(v, ptr, {"m", "beta", "transition"});
  const auto m = chk.integer(v, ptr, "m", true, 2, 255);
  const auto beta = chk.real(v, ptr, "beta", true, 1.0, 1e300, true);
  std::vector<std::vector<int>> rows;
  if (const json* t = chk.field(v, ptr, "transition", false); t != nullptr && m) {
    const std::string at = pointer_append(ptr, "transition");
    const auto mm = static_cast<std::size_t>(*m);
    if (!t->is_array() || t->size() != mm) {
      chk.fail(at, ViolationKind::kSchema, "expected " + std::to_string(mm) + " rows");
    } else {
      for (std::size_t i = 0; i < mm; ++i) {
        const std::string ri = pointer_append(at, std::to_string(i));
        const json& row = (*t)[i];
        if (!row.is_array() || row.size() != mm) {
          chk.fail(ri, ViolationKind::kSchema, "expected " + std::to_string(mm) + " entries");
          continue;
        }
        std::vector<int> r;
        bool any = false;
        for (std::size_t j = 0; j < mm; ++j) {
          const json& x = row[j];
          if (!x.is_number_integer() || (x.get<long long>() != 0 && x.get<long long>() != 1)) {
            chk.fail(pointer_append(ri, std::to_string(j)), ViolationKind::kSchema,
                     "transition entries must be 0 or 1");
            r.push_back(0);
            continue;
          }
          r.push_back(x.get<int>());
          any = any || r.back() == 1;
        }
        if (!any && r.size() == mm) {
          chk.fail(ri, ViolationKind::kInvariant,
                   "transition row " + std::to_string(i) + " (symbol " + std::to_string(i + 1) +
                       ") is all zero: the symbol has no successor");
        }
        rows.push_back(std::move(r));
      }
    }
  } else if (m) {
    rows.assign(static_cast<std::size_t>(*m), std::vector<int>(static_cast<std::size_t>(*m), 1));
  }
  if (chk.count() != before || !m || !beta) return std::nullopt;
  try {
    return sofic::ShiftSpace(static_cast<int>(*m), std::move(rows), *beta);
  } catch (const Error& e) {
    chk.fail(ptr, ViolationKind::kInvariant, e.detail());
    return std::nullopt;
  }
}

json to_json(const sofic::ShiftSpace& space) {
  return json{{"m", space.alphabet_size()},
              {"beta", space.beta()},
              {"transition", space.transition_rows()}};
}

std::optional<measures::MarkovMeasure> parse_measure(const json& v, const std::string& ptr,
                                                     const sofic::ShiftSpace& space, Checker& chk) {
  if (!chk.object(v, ptr)) return std::nullopt;
  const std::size_t before = chk.count();
  chk.only(v, ptr, {"stochastic", "stationary", "bernoulli", "parry"});
  const int m = space.alphabet_size();
  const auto mm = static_cast<std::size_t>(m);
  const int forms = static_cast<int>(v.contains("stochastic")) +
                    static_cast<int>(v.contains("bernoulli")) +
                    static_cast<int>(v.contains("parry"));
  if (forms != 1) {
    chk.fail(ptr, ViolationKind::kSchema,
             "give exactly one of 'stochastic', 'bernoulli' or 'parry'");
    return std::nullopt;
  }
  if (v.contains("parry")) {
    const auto flag = chk.boolean(v, ptr, "parry", true);
    if (flag && !*flag) {
      chk.fail(pointer_append(ptr, "parry"), ViolationKind::kInvariant, "must be true");
    }
    if (chk.count() != before) return std::nullopt;
    try {
      return measures::MarkovMeasure::parry(space);
    } catch (const Error& e) {
      chk.fail(ptr, ViolationKind::kInvariant, e.detail());
      return std::nullopt;
    }
  }
  std::vector<std::vector<double>> rows;
  if (v.contains("bernoulli")) {
    const std::string at = pointer_append(ptr, "bernoulli");
    const auto p = chk.reals(v, ptr, "bernoulli", true, 0.0, 1.0);
    if (!p) return std::nullopt;
    if (p->size() != mm) {
      chk.fail(at, ViolationKind::kSchema, "expected " + std::to_string(m) + " probabilities");
      return std::nullopt;
    }
    rows.assign(mm, *p);
    if (!space.is_full_shift()) {
      chk.fail(at, ViolationKind::kInvariant, "Bernoulli measures need the full shift");
      return std::nullopt;
    }
  } else {
    const json& t = v["stochastic"];
    const std::string at = pointer_append(ptr, "stochastic");
    if (!t.is_array() || t.size() != mm) {
      chk.fail(at, ViolationKind::kSchema, "expected " + std::to_string(m) + " rows");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < mm; ++i) {
      const std::string ri = pointer_append(at, std::to_string(i));
      const json& row = t[i];
      if (!row.is_array() || row.size() != mm) {
        chk.fail(ri, ViolationKind::kSchema, "expected " + std::to_string(m) + " entries");
        continue;
      }
      std::vector<double> r;
      for (std::size_t j = 0; j < mm; ++j) {
        const json& x = row[j];
        const std::string rij = pointer_append(ri, std::to_string(j));
        if (!x.is_number() || x.get<double>() < 0.0 || x.get<double>() > 1.0) {
          chk.fail(rij, ViolationKind::kSchema, "expected a probability in [0, 1]");
          r.push_back(0.0);
          continue;
        }
        r.push_back(x.get<double>());
        if (r.back() > 0.0 && !space.allowed(static_cast<Symbol>(i + 1), static_cast<Symbol>(j + 1))) {
          chk.fail(rij, ViolationKind::kInvariant, "mass on a forbidden transition");
        }
      }
      rows.push_back(std::move(r));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (double x : rows[i]) sum += x;
    if (std::abs(sum - 1.0) > 1e-12) {
      const std::string at = v.contains("bernoulli")
                                 ? pointer_append(ptr, "bernoulli")
                                 : pointer_append(pointer_append(ptr, "stochastic"), std::to_string(i));
      chk.fail(at, ViolationKind::kInvariant,
               "row " + std::to_string(i) + " sums to " + format_real(sum) + ", not 1");
      if (v.contains("bernoulli")) break;
    }
  }
  std::optional<std::vector<double>> stationary;
  if (v.contains("stationary")) {
    stationary = chk.reals(v, ptr, "stationary", true, 0.0, 1.0);
    if (stationary && stationary->size() != mm) {
      chk.fail(pointer_append(ptr, "stationary"), ViolationKind::kSchema,
               "expected " + std::to_string(m) + " entries");
    }
  }
  if (chk.count() != before) return std::nullopt;
  try {
    return measures::MarkovMeasure(space, std::move(rows), std::move(stationary));
  } catch (const Error& e) {
    chk.fail(ptr, ViolationKind::kInvariant, e.detail());
    return std::nullopt;
  }
}

json to_json(const measures::MarkovMeasure& mu) {
  return json{{"stochastic", mu.stochastic_rows()}, {"stationary", mu.stationary_vector()}};
}

std::optional<LocalPotential> parse_potential(const json& obj, const std::string& ptr,
                                              const sofic::ShiftSpace& space, Checker& chk) {
  const std::size_t before = chk.count();
  const int m = space.alphabet_size();
  std::optional<std::int64_t> window;
  if (obj.contains("window")) window = chk.integer(obj, ptr, "window", true, 1, 16);
  const json* table = chk.field(obj, ptr, "table", true);
  if (table == nullptr) return std::nullopt;
  const std::string at = pointer_append(ptr, "table");
  if (!table->is_object() || table->empty()) {
    chk.fail(at, ViolationKind::kSchema, "expected a non-empty object mapping words to values");
    return std::nullopt;
  }
  std::vector<std::pair<Word, double>> entries;
  for (auto it = table->begin(); it != table->end(); ++it) {
    const std::string ki = pointer_append(at, it.key());
    auto w = parse_word(json(it.key()), ki, m, chk);
    if (!w) continue;
    if (!it.value().is_number()) {
      chk.fail(ki, ViolationKind::kSchema, "expected a number");
      continue;
    }
    if (w->empty()) {
      chk.fail(ki, ViolationKind::kInvariant, "empty word");
      continue;
    }
    entries.emplace_back(std::move(*w), it.value().get<double>());
  }
  if (chk.count() != before) return std::nullopt;
  const int k = window ? static_cast<int>(*window) : static_cast<int>(entries.front().first.size());
  if (ipow(m, k) > (std::uint64_t{1} << 20)) {
    chk.fail(at, ViolationKind::kInvariant, "m^window exceeds 2^20 entries");
    return std::nullopt;
  }
  const std::uint64_t size = ipow(m, k);
  std::vector<double> values(size, 0.0);
  std::vector<char> seen(size, 0);
  for (const auto& [w, x] : entries) {
    if (static_cast<int>(w.size()) != k) {
      chk.fail(pointer_append(at, word_key(w, m)), ViolationKind::kInvariant,
               "word length " + std::to_string(w.size()) + " differs from window " +
                   std::to_string(k));
      continue;
    }
    const std::uint64_t code = measures::encode(w, m);
    values[code] = x;
    seen[code] = 1;
  }
  for (std::uint64_t code = 0; code < size; ++code) {
    if (seen[code]) continue;
    const Word w = decode(code, m, k);
    if (sofic::is_admissible(w, space)) {
      chk.fail(at, ViolationKind::kSchema, "missing entry for admissible word " + word_key(w, m));
    }
  }
  if (chk.count() != before) return std::nullopt;
  try {
    return LocalPotential(m, k, std::move(values));
  } catch (const Error& e) {
    chk.fail(at, ViolationKind::kInvariant, e.detail());
    return std::nullopt;
  }
}

json potential_table(const LocalPotential& phi) {
  json table = json::object();
  const int m = phi.alphabet_size();
  const auto& values = phi.values();
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    table[word_key(decode(code, m, phi.window()), m)] = values[code];
  }
  return table;
}

std::optional<carath::CStructure> parse_structure(const json& v, const std::string& ptr,
                                                  const sofic::ShiftSpace& space, Checker& chk) {
  if (!chk.object(v, ptr)) return std::nullopt;
  chk.only(v, ptr, {"kind", "window", "table"});
  const auto kind = chk.string(v, ptr, "kind", true);
  if (!kind) return std::nullopt;
  if (*kind == "entropy" || *kind == "hausdorff") {
    if (v.contains("table")) {
      chk.fail(pointer_append(ptr, "table"), ViolationKind::kSchema,
               "a " + *kind + " structure takes no table");
      return std::nullopt;
    }
    return *kind == "entropy" ? carath::CStructure::entropy(space)
                              : carath::CStructure::hausdorff(space);
  }
  if (*kind != "pressure" && *kind != "appendix") {
    chk.fail(pointer_append(ptr, "kind"), ViolationKind::kSchema,
             "unknown kind '" + *kind + "' (entropy, hausdorff, pressure, appendix)");
    return std::nullopt;
  }
  auto phi = parse_potential(v, ptr, space, chk);
  if (!phi) return std::nullopt;
  try {
    return *kind == "pressure" ? carath::CStructure::pressure(space, std::move(*phi))
                               : carath::CStructure::appendix(space, std::move(*phi));
  } catch (const Error& e) {
    chk.fail(pointer_append(ptr, "table"), ViolationKind::kInvariant, e.detail());
    return std::nullopt;
  }
}

json to_json(const carath::CStructure& s) {
  json out{{"kind", std::string(carath::to_string(s.kind()))}};
  if (s.potential()) {
    out["window"] = s.potential()->window();
    out["table"] = potential_table(*s.potential());
  }
  return out;
}

json to_json(const construct::Itinerary& it) {
  json nets = json::array();
  for (const auto& net : it.nets) {
    nets.push_back({{"level", net.level},
                    {"mesh", net.mesh},
                    {"denominator", net.denominator},
                    {"nodes", net.nodes}});
  }
  json blocks = json::array();
  for (const auto& b : it.blocks) {
    blocks.push_back({{"level", b.level}, {"j", b.j}, {"ell", b.ell}, {"length", b.length}});
  }
  return json{{"first_level", it.first_level},
              {"max_level", it.max_level},
              {"eps_tilde", it.eps_tilde},
              {"eps_hat", it.eps_hat},
              {"nets", std::move(nets)},
              {"gamma_n", it.gamma_n},
              {"blocks", std::move(blocks)},
              {"block_total", it.block_total()}};
}

json to_json(const construct::ConstructedOrbit& orbit) {
  json spans = json::array();
  for (const auto& s : orbit.spans) {
    spans.push_back(
        {{"start", s.start}, {"end", s.end}, {"level", s.level}, {"j", s.j}, {"ell", s.ell}});
  }
  return json{{"length", orbit.word.size()},
              {"spans", std::move(spans)},
              {"connectors", orbit.connectors},
              {"block_seeds", orbit.block_seeds}};
}

std::string orbit_bytes(std::span<const Symbol> word) {
  return std::string(word.begin(), word.end());
}

Word read_orbit_file(const std::filesystem::path& path, const sofic::ShiftSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, kModule, "read_orbit", "cannot open " + path.string());
  }
  Word w((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, kModule, "read_orbit", "read failed for " + path.string());
  }
  sofic::check_symbols(w, space);
  return w;
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
}

Csv& Csv::cell(double v) { return cell(std::string_view(format_real(v))); }

Csv& Csv::cell(std::int64_t v) { return cell(std::string_view(std::to_string(v))); }

Csv& Csv::cell(std::uint64_t v) { return cell(std::string_view(std::to_string(v))); }

Csv& Csv::cell(std::string_view v) {
  if (filled_ > 0) out_ += ',';
  if (v.find_first_of(",\"\n\r") != std::string_view::npos) {
    out_ += '"';
    for (char c : v) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  } else {
    out_ += v;
  }
  ++filled_;
  return *this;
}

void Csv::end_row() {
  if (filled_ != columns_) {
    throw Error(ErrorKind::kInput, kModule, "csv",
                "row has " + std::to_string(filled_) + " cells, header has " +
                    std::to_string(columns_));
  }
  out_ += '\n';
  filled_ = 0;
}

std::string finsupp_csv(const measures::FinSuppMeasure& mu) {
  Csv csv({"weight", "prefix"});
  for (std::size_t i = 0; i < mu.size(); ++i) {
    csv.cell(mu.atoms()[i].weight).cell(word_key(mu.word(i), mu.alphabet_size()));
    csv.end_row();
  }
  return csv.str();
}

std::string emergence_csv(const pointwise::EmergenceReport& report) {
  Csv csv({"epsilon", "lower", "upper", "n_window_start", "n_window_end"});
  for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
    csv.cell(report.epsilons[i])
        .cell(report.lower[i])
        .cell(report.upper[i])
        .cell(std::uint64_t{report.n_window_start})
        .cell(std::uint64_t{report.n_window_end});
    csv.end_row();
  }
  return csv.str();
}

json emergence_json(const pointwise::EmergenceReport& report) {
  auto fit = [](const pointwise::Fit& f) {
    return json{{"slope", f.slope},
                {"intercept", f.intercept},
                {"residual", f.residual},
                {"degenerate", f.degenerate}};
  };
  return json{{"epsilon", report.epsilons},
              {"lower", report.lower},
              {"upper", report.upper},
              {"n_window_start", report.n_window_start},
              {"n_window_end", report.n_window_end},
              {"tail_fraction", report.tail_fraction},
              {"upper_fit", fit(report.upper_fit)},
              {"lower_fit", fit(report.lower_fit)}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, kModule, "sha256", "digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

}  // namespace elab::io
