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

#ifndef ELAB_CLI_IO_HPP_
#define ELAB_CLI_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "elab/carath.hpp"
#include "elab/construct.hpp"
#include "elab/measures.hpp"
#include "elab/pointwise.hpp"
#include "elab/potential.hpp"
#include "elab/sofic.hpp"

namespace elab::io {

using json = nlohmann::json;

enum class ViolationKind { kParse, kSchema, kInvariant };
std::string_view to_string(ViolationKind kind);

struct ConfigViolation {
  std::string pointer;  // RFC 6901
  ViolationKind kind;
  std::string message;
};

std::string pointer_append(const std::string& base, std::string_view token);

// Collects every violation found while reading a document instead of
// stopping at the first. Field readers return nullopt on any problem.
class Checker {
 public:
  void fail(std::string pointer, ViolationKind kind, std::string message);
  bool ok() const { return violations_.empty(); }
  std::size_t count() const { return violations_.size(); }
  const std::vector<ConfigViolation>& violations() const { return violations_; }

  // The member `key` of obj, or nullptr. A missing required member is a
  // schema violation.
  const json* field(const json& obj, const std::string& ptr, std::string_view key,
                    bool required);
  bool object(const json& v, const std::string& ptr);
  // Members of obj outside `allowed` are schema violations.
  void only(const json& obj, const std::string& ptr, const std::vector<std::string_view>& allowed);

  std::optional<std::int64_t> integer(const json& obj, const std::string& ptr, std::string_view key,
                                      bool required, std::int64_t lo, std::int64_t hi);
  std::optional<std::uint64_t> unsigned64(const json& obj, const std::string& ptr,
                                          std::string_view key, bool required);
  // Closed range [lo, hi]; open_lo excludes lo.
  std::optional<double> real(const json& obj, const std::string& ptr, std::string_view key,
                             bool required, double lo, double hi, bool open_lo = false);
  std::optional<bool> boolean(const json& obj, const std::string& ptr, std::string_view key,
                              bool required);
  std::optional<std::string> string(const json& obj, const std::string& ptr, std::string_view key,
                                    bool required);
  std::optional<std::vector<double>> reals(const json& obj, const std::string& ptr,
                                           std::string_view key, bool required, double lo,
                                           double hi, bool open_lo = false);
  std::optional<std::vector<std::int64_t>> integers(const json& obj, const std::string& ptr,
                                                    std::string_view key, bool required,
                                                    std::int64_t lo, std::int64_t hi);

 private:
  std::vector<ConfigViolation> violations_;
};

// Words are arrays of 1-based symbols; a string of digits is accepted when
// the alphabet has at most 9 symbols, and a comma-separated string always.
std::optional<Word> parse_word(const json& v, const std::string& ptr, int m, Checker& chk);
std::string word_key(std::span<const Symbol> word, int m);

std::optional<sofic::ShiftSpace> parse_space(const json& v, const std::string& ptr, Checker& chk);
json to_json(const sofic::ShiftSpace& space);

// {"stochastic": rows, "stationary": vector?}, {"bernoulli": probs} or
// {"parry": true}, on the given space.
std::optional<measures::MarkovMeasure> parse_measure(const json& v, const std::string& ptr,
                                                     const sofic::ShiftSpace& space, Checker& chk);
json to_json(const measures::MarkovMeasure& mu);

// Reads "window" (optional, inferred from the keys) and "table" from obj.
// Entries may be omitted only for inadmissible windows.
std::optional<LocalPotential> parse_potential(const json& obj, const std::string& ptr,
                                              const sofic::ShiftSpace& space, Checker& chk);
json potential_table(const LocalPotential& phi);

// {"kind", "window", "table"}; the table is required for pressure and
// appendix structures only.
std::optional<carath::CStructure> parse_structure(const json& v, const std::string& ptr,
                                                  const sofic::ShiftSpace& space, Checker& chk);
json to_json(const carath::CStructure& s);

json to_json(const construct::Itinerary& it);
// Spans, connector lengths and block seeds; the symbols go to orbit.bin.
json to_json(const construct::ConstructedOrbit& orbit);

// One byte per symbol.
std::string orbit_bytes(std::span<const Symbol> word);
Word read_orbit_file(const std::filesystem::path& path, const sofic::ShiftSpace& space);

// Shortest round-trip form with 17 significant digits and '.' as separator.
std::string format_real(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& cell(double v);
  Csv& cell(std::int64_t v);
  Csv& cell(std::uint64_t v);
  Csv& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  Csv& cell(std::string_view v);
  void end_row();
  std::string str() const { return out_; }

 private:
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string out_;
};

// weight, prefix
std::string finsupp_csv(const measures::FinSuppMeasure& mu);
// epsilon, lower, upper, n_window_start, n_window_end
std::string emergence_csv(const pointwise::EmergenceReport& report);
json emergence_json(const pointwise::EmergenceReport& report);

std::string sha256_hex(std::string_view data);

}  // namespace elab::io

#endif  // ELAB_CLI_IO_HPP_
