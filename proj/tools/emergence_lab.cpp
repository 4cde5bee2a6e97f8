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

// emergence-lab <subcommand> --config <path> [--threads N] [--out DIR]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "elab/cli/runner.hpp"
#include "elab/error.hpp"

namespace {

using elab::Error;
using elab::ErrorKind;
using elab::cli::json;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// output_dir from a config that may not validate, so that its error can
// still be written where the caller expects it.
std::optional<std::string> raw_output_dir(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_object() && doc.contains("output_dir") && doc["output_dir"].is_string()) {
    return doc["output_dir"].get<std::string>();
  }
  return std::nullopt;
}

int report(const Error& e, const std::optional<std::string>& dir) {
  if (dir) {
    try {
      elab::cli::write_error(*dir, e);
    } catch (const Error& io) {
      std::cerr << elab::cli::error_json(io).dump() << "\n";
    }
  }
  std::cerr << elab::cli::error_json(e).dump() << "\n";
  return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic-dynamics experiments: entropy, pressure, dimension, emergence."};
  app.require_subcommand(1);
  std::string config;
  unsigned threads = 0;
  std::string out;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--threads", threads, "worker threads (overrides EMERGENCE_THREADS)")
        ->check(CLI::Range(1u, 4096u));
    sub->add_option("--out", out, "output directory (overrides output_dir)");
  };
  add("validate", "check a config and list every violation");
  for (auto name : elab::cli::experiment_names()) {
    add(std::string(name), "run the " + std::string(name) + " experiment");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  const auto validation = elab::cli::validate_config(std::filesystem::path(config));
  if (command == "validate") {
    json result{{"valid", validation.config.has_value()},
                {"violations", elab::cli::violations_json(validation.violations)}};
    if (validation.config) result["experiment"] = validation.config->experiment;
    std::cout << result.dump(2) << "\n";
    return validation.config ? 0 : kExitConfig;
  }

  std::optional<std::string> dir;
  if (!out.empty()) {
    dir = out;
  } else if (validation.config) {
    dir = validation.config->output_dir;
  } else {
    dir = raw_output_dir(config);
  }
  if (!validation.config) return report(elab::cli::config_error(validation.violations), dir);
  const auto& cfg = *validation.config;
  if (cfg.experiment != command) {
    return report(Error(ErrorKind::kConfig, "cli", "run",
                        "config describes experiment '" + cfg.experiment + "', not '" + command + "'"),
                  dir);
  }
  try {
    elab::cli::RunOptions options;
    options.threads = elab::cli::resolve_threads(threads > 0 ? std::optional<unsigned>(threads)
                                                             : std::nullopt);
    if (!out.empty()) options.out_dir = out;
    const auto manifest = elab::cli::run(cfg, options);
    std::cout << manifest.to_json().dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    return report(e, dir);
  }
}
