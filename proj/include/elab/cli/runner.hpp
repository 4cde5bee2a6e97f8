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

#ifndef ELAB_CLI_RUNNER_HPP_
#define ELAB_CLI_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elab/cli/io.hpp"
#include "elab/error.hpp"
#include "elab/sofic.hpp"

namespace elab::cli {

using io::json;

inline constexpr std::string_view kArtifactVersion = "emergence-lab 0.1.0";

const std::vector<std::string_view>& experiment_names();

struct ExperimentConfig {
  json document;  // as parsed; its dump() is the canonical form
  sofic::ShiftSpace space;
  std::string experiment;
  json parameters;
  std::uint64_t seed = 0;
  std::optional<std::string> output_dir;
};

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<io::ConfigViolation> violations;
};

// Checks the top level and the experiment's parameters before any
// computation. Parse errors are reported at the empty pointer.
Validation validate_config(const json& document);
Validation validate_config(const std::filesystem::path& path);

// Error carrying every violation; detail() lists them one per line.
Error config_error(const std::vector<io::ConfigViolation>& violations);
json violations_json(const std::vector<io::ConfigViolation>& violations);

struct RunOptions {
  unsigned threads = 1;
  std::optional<std::filesystem::path> out_dir;  // overrides output_dir
};

struct RunManifest {
  std::string config_sha256;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<std::string> files;
  std::map<std::string, std::uint64_t> seeds;
  json to_json() const;
};

// Computes everything in memory, then writes each file via temp + rename and
// the manifest last. On failure the output directory holds only error.json;
// data files listed by an earlier manifest there are removed. Rethrows.
RunManifest run(const ExperimentConfig& config, const RunOptions& options);

json error_json(const Error& e);
// Atomically replaces dir/error.json and removes earlier outputs.
void write_error(const std::filesystem::path& dir, const Error& e);

// --threads wins over EMERGENCE_THREADS; otherwise all cores.
unsigned resolve_threads(std::optional<unsigned> flag);

}  // namespace elab::cli

#endif  // ELAB_CLI_RUNNER_HPP_
