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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "elab/cli/io.hpp"
#include "elab/cli/runner.hpp"

namespace elab::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "elab_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentConfig valid(const json& doc) {
  auto v = validate_config(doc);
  if (!v.config) throw config_error(v.violations);
  return *v.config;
}

bool has_violation(const Validation& v, const std::string& pointer, io::ViolationKind kind) {
  for (const auto& x : v.violations) {
    if (x.pointer == pointer && x.kind == kind) return true;
  }
  return false;
}

const json kFull2 = {{"m", 2}, {"beta", 2.0}};

json two_level_construct() {
  return {{"measures",
           {{{"bernoulli", {0.5, 0.5}}},
            {{"bernoulli", {0.15, 0.85}}},
            {{"bernoulli", {0.85, 0.15}}}}},
          {"max_level", 2},
          {"gamma", {{"samples", 40}}}};
}

TEST(ValidateTest, MinimalEntropyConfig) {
  const auto v = validate_config(json{{"space", kFull2}, {"experiment", "entropy"}});
  ASSERT_TRUE(v.config);
  EXPECT_TRUE(v.violations.empty());
  EXPECT_EQ(v.config->seed, 0u);
  EXPECT_EQ(v.config->space, sofic::ShiftSpace::full_shift(2));
}

TEST(ValidateTest, ZeroTransitionRowNamesTheRow) {
  const json doc = {{"space", {{"m", 3}, {"beta", 2.0}, {"transition", {{1, 1, 0}, {0, 0, 0}, {1, 0, 1}}}}},
                    {"experiment", "entropy"}};
  const auto v = validate_config(doc);
  EXPECT_FALSE(v.config);
  ASSERT_TRUE(has_violation(v, "/space/transition/1", io::ViolationKind::kInvariant));
  EXPECT_NE(v.violations[0].message.find("row 1"), std::string::npos);
}

TEST(ValidateTest, PressureWithoutTableIsASchemaViolation) {
  const auto v = validate_config(
      json{{"space", kFull2}, {"experiment", "pressure"}, {"parameters", {{"n", {8}}}}});
  EXPECT_FALSE(v.config);
  EXPECT_TRUE(has_violation(v, "/parameters/table", io::ViolationKind::kSchema));
}

TEST(ValidateTest, ReportsEveryViolation) {
  const json doc = {{"space", {{"m", 2}, {"beta", 0.5}}},
                    {"experiment", "outer-sweep"},
                    {"colour", "blue"},
                    {"seed", -4},
                    {"parameters", {{"t", {0.3, "x"}}, {"depth_cap", {4}}}}};
  const auto v = validate_config(doc);
  EXPECT_FALSE(v.config);
  EXPECT_TRUE(has_violation(v, "/space/beta", io::ViolationKind::kInvariant));
  EXPECT_TRUE(has_violation(v, "/colour", io::ViolationKind::kSchema));
  EXPECT_TRUE(has_violation(v, "/seed", io::ViolationKind::kInvariant));
  EXPECT_TRUE(has_violation(v, "/parameters/structure", io::ViolationKind::kSchema));
}

TEST(ValidateTest, ParameterInvariantsCarryPointers) {
  const json doc = {
      {"space", kFull2},
      {"experiment", "construct"},
      {"parameters",
       {{"measures", {{{"stochastic", {{0.5, 0.5}, {0.7, 0.2}}}}, {{"bernoulli", {0.1, 0.9}}}}},
        {"max_level", 1},
        {"eps_tilde", {0.5}}}}};
  const auto v = validate_config(doc);
  EXPECT_FALSE(v.config);
  EXPECT_TRUE(has_violation(v, "/parameters/measures/0/stochastic/1", io::ViolationKind::kInvariant));
  EXPECT_TRUE(has_violation(v, "/parameters/eps_tilde", io::ViolationKind::kSchema));
}

TEST(ValidateTest, FileErrors) {
  const fs::path dir = scratch("files");
  fs::create_directories(dir);
  auto v = validate_config(dir / "missing.json");
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].kind, io::ViolationKind::kParse);
  std::ofstream(dir / "broken.json") << "{\"space\": ";
  v = validate_config(dir / "broken.json");
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].kind, io::ViolationKind::kParse);
}

TEST(IoTest, WordsAndTables) {
  io::Checker chk;
  EXPECT_EQ(io::parse_word(json("121"), "/w", 2, chk), (Word{1, 2, 1}));
  EXPECT_EQ(io::parse_word(json("1,12,3"), "/w", 12, chk), (Word{1, 12, 3}));
  EXPECT_EQ(io::parse_word(json::array({2, 2}), "/w", 2, chk), (Word{2, 2}));
  EXPECT_TRUE(chk.ok());
  EXPECT_FALSE(io::parse_word(json("13"), "/w", 2, chk));
  EXPECT_EQ(io::word_key(Word{1, 12}, 12), "1,12");

  const auto gm = sofic::ShiftSpace::golden_mean();
  io::Checker chk2;
  // "22" is forbidden in the golden mean shift, so it may be omitted.
  const json obj = {{"table", {{"11", 0.5}, {"12", -1.0}, {"21", 2.0}}}};
  const auto phi = io::parse_potential(obj, "/p", gm, chk2);
  ASSERT_TRUE(phi) << config_error(chk2.violations()).detail();
  EXPECT_EQ(phi->window(), 2);
  EXPECT_EQ((*phi)(Word{2, 1}), 2.0);
  const json back = io::potential_table(*phi);
  EXPECT_EQ(back["12"], -1.0);

  io::Checker chk3;
  EXPECT_FALSE(io::parse_potential(json{{"table", {{"11", 0.5}, {"12", 1.0}}}}, "/p", gm, chk3));
  ASSERT_EQ(chk3.violations().size(), 1u);
  EXPECT_EQ(chk3.violations()[0].pointer, "/p/table");
}

TEST(IoTest, StructureAndSpaceRoundTrip) {
  const auto space = sofic::ShiftSpace::golden_mean(1.5);
  io::Checker chk;
  const auto back = io::parse_space(io::to_json(space), "/space", chk);
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, space);
  const json sj = {{"kind", "appendix"}, {"window", 1}, {"table", {{"1", 1.0}, {"2", 2.0}}}};
  const auto s = io::parse_structure(sj, "/s", space, chk);
  ASSERT_TRUE(s);
  EXPECT_EQ(io::to_json(*s), sj);
  const json neg = {{"kind", "appendix"}, {"table", {{"1", 1.0}, {"2", -2.0}}}};
  EXPECT_FALSE(io::parse_structure(neg, "/s", space, chk));
  EXPECT_EQ(chk.violations().back().pointer, "/s/table");
}

TEST(IoTest, CsvAndDigest) {
  EXPECT_EQ(io::format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_real(2.0), "2");
  io::Csv csv({"a", "b"});
  csv.cell(1.5).cell("x,y");
  csv.end_row();
  EXPECT_EQ(csv.str(), "a,b\n1.5,\"x,y\"\n");
  csv.cell(1);
  EXPECT_THROW(csv.end_row(), Error);
  EXPECT_EQ(io::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunTest, EntropyFullShiftIsLogTwo) {
  const fs::path dir = scratch("entropy");
  const auto cfg = valid({{"space", kFull2}, {"experiment", "entropy"}});
  const auto manifest = run(cfg, {1, dir});
  EXPECT_EQ(manifest.files, (std::vector<std::string>{"entropy.csv"}));
  EXPECT_EQ(manifest.config_sha256, io::sha256_hex(cfg.document.dump()));
  const std::string csv = slurp(dir / "entropy.csv");
  const auto comma = csv.rfind(',');
  EXPECT_NEAR(std::stod(csv.substr(comma + 1)), std::log(2.0), 1e-12);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "quantity,value");
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["files"], json::array({"entropy.csv"}));
  EXPECT_EQ(listing(dir), (std::vector<std::string>{"entropy.csv", "manifest.json"}));
}

TEST(RunTest, ReproducibleAcrossThreadCounts) {
  const json doc = {{"space", kFull2},
                    {"experiment", "emergence"},
                    {"seed", 99},
                    {"parameters",
                     {{"source",
                       {{"type", "oscillating"},
                        {"a", {{"bernoulli", {0.1, 0.9}}}},
                        {"b", {{"bernoulli", {0.9, 0.1}}}},
                        {"first_block", 64},
                        {"ratio", 2.0},
                        {"length", 40000}}},
                      {"eps", {0.2, 0.1, 0.05}},
                      {"count", 30}}}};
  const auto cfg = valid(doc);
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  const auto ma = run(cfg, {1, a});
  const auto mb = run(cfg, {3, b});
  EXPECT_EQ(ma.files, mb.files);
  EXPECT_EQ(ma.seeds, mb.seeds);
  for (const auto& f : ma.files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(RunTest, InfeasibleConstructLeavesOnlyTheErrorFile) {
  const fs::path dir = scratch("infeasible");
  // A successful run first, so stale outputs exist.
  run(valid({{"space", kFull2}, {"experiment", "entropy"}}), {1, dir});
  ASSERT_TRUE(fs::exists(dir / "entropy.csv"));
  json params = {{"measures", {{{"bernoulli", {0.5, 0.5}}}, {{"bernoulli", {0.1, 0.9}}}}},
                 {"max_level", 1},
                 {"max_group_length", 64},
                 {"eps_tilde", {0.5, 0.01}},
                 {"eps_hat", {0.5, 0.25}},
                 {"gamma_n", {{1}, {1, 1}}}};
  const auto cfg = valid({{"space", kFull2}, {"experiment", "construct"}, {"parameters", params}});
  try {
    run(cfg, {1, dir});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchedule);
  }
  EXPECT_EQ(listing(dir), (std::vector<std::string>{"error.json"}));
  const json err = json::parse(slurp(dir / "error.json"));
  EXPECT_EQ(err["module"], "constructor");
  EXPECT_EQ(err["operation"], "block_schedule");
  EXPECT_EQ(err["kind"], "schedule");
  EXPECT_NE(err["detail"].get<std::string>().find("eq:0725a"), std::string::npos);
  EXPECT_EQ(err.size(), 4u);
}

TEST(RunTest, EmergenceOnConstructedLevelTwoOrbit) {
  const fs::path dir = scratch("emergence_l2");
  json source = two_level_construct();
  source["type"] = "construct";
  const auto cfg = valid({{"space", kFull2},
                          {"experiment", "emergence"},
                          {"seed", 11},
                          {"parameters",
                           {{"source", source},
                            {"depth", 5},
                            {"count", 40},
                            {"eps", {0.2, 0.1, 0.05}},
                            {"tail_fraction", 1.0}}}});
  const auto manifest = run(cfg, {1, dir});
  EXPECT_EQ(manifest.files, (std::vector<std::string>{"emergence.csv", "emergence_fit.json"}));
  EXPECT_EQ(manifest.seeds.count("orbit"), 1u);
  const json fit = json::parse(slurp(dir / "emergence_fit.json"));
  EXPECT_TRUE(fit.contains("upper_fit"));
  EXPECT_TRUE(fit["upper_fit"].contains("slope"));
  const std::string csv = slurp(dir / "emergence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epsilon,lower,upper,n_window_start,n_window_end");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["files"], json::array({"emergence.csv", "emergence_fit.json"}));
}

TEST(RunTest, ConstructOutputsReload) {
  const fs::path dir = scratch("construct");
  const auto cfg = valid({{"space", kFull2},
                          {"experiment", "construct"},
                          {"seed", 5},
                          {"parameters", two_level_construct()}});
  const auto manifest = run(cfg, {2, dir});
  EXPECT_EQ(manifest.files,
            (std::vector<std::string>{"itinerary.json", "orbit.json", "orbit.bin"}));
  const json orbit = json::parse(slurp(dir / "orbit.json"));
  const Word word = io::read_orbit_file(dir / "orbit.bin", cfg.space);
  EXPECT_EQ(orbit["length"].get<std::size_t>(), word.size());
  const json it = json::parse(slurp(dir / "itinerary.json"));
  EXPECT_EQ(it["max_level"], 2);
  EXPECT_EQ(orbit["spans"].size(), it["blocks"].size());

  // The stored symbols feed the emergence experiment unchanged.
  const fs::path dir2 = scratch("from_file");
  const auto cfg2 = valid({{"space", kFull2},
                           {"experiment", "emergence"},
                           {"parameters",
                            {{"source", {{"type", "file"}, {"path", (dir / "orbit.bin").string()}}},
                             {"eps", {0.2, 0.1}},
                             {"count", 20},
                             {"dump_final_snapshot", true}}}});
  const auto m2 = run(cfg2, {1, dir2});
  EXPECT_EQ(m2.files.back(), "final_snapshot.csv");
  EXPECT_EQ(slurp(dir2 / "final_snapshot.csv").substr(0, 15), "weight,prefix\n0");
}

TEST(RunTest, OuterSweepRows) {
  const fs::path dir = scratch("sweep");
  const auto cfg = valid({{"space", kFull2},
                          {"experiment", "outer-sweep"},
                          {"parameters",
                           {{"structure", {{"kind", "entropy"}}},
                            {"t", {0.5, 0.3}},
                            {"depth_cap", {6, 4}}}}});
  run(cfg, {2, dir});
  std::istringstream in(slurp(dir / "outer_sweep.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,depth_cap,value");
  const double ts[] = {0.3, 0.3, 0.5, 0.5};
  const int caps[] = {4, 6, 4, 6};
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(std::getline(in, line));
    double t = 0, v = 0;
    int cap = 0;
    char c1, c2;
    std::istringstream row(line);
    row >> t >> c1 >> cap >> c2 >> v;
    EXPECT_EQ(t, ts[i]);
    EXPECT_EQ(cap, caps[i]);
    EXPECT_NEAR(v, 2.0 * std::exp(-t), 1e-12);
  }
}

TEST(RunTest, RemainingExperimentsProduceTheirFiles) {
  const json table = {{"1", 1.0}, {"2", 1.0}};
  const std::vector<std::pair<json, std::vector<std::string>>> cases = {
      {{{"experiment", "pressure"}, {"parameters", {{"table", table}, {"n", {4, 8}}}}},
       {"pressure.csv"}},
      {{{"experiment", "bowen"}, {"parameters", {{"table", table}}}}, {"bowen.csv"}},
      {{{"experiment", "conditions"},
        {"parameters", {{"structure", {{"kind", "entropy"}}}, {"depth", 6}, {"t_grid", {0.3, 0.9}}}}},
       {"conditions.csv", "conditions.json"}},
      {{{"experiment", "restricted-probe"},
        {"parameters",
         {{"structure", {{"kind", "entropy"}}},
          {"z", "1"},
          {"measure", {{"bernoulli", {0.5, 0.5}}}},
          {"n", 6},
          {"eps", 0.3},
          {"t", 0.5},
          {"depth_cap", 9}}}},
       {"restricted_probe.csv"}},
      {{{"experiment", "saturate"}, {"parameters", two_level_construct()}},
       {"saturation.csv", "saturation.json"}},
  };
  for (const auto& [partial, files] : cases) {
    json doc = partial;
    doc["space"] = kFull2;
    const std::string name = doc["experiment"];
    const fs::path dir = scratch("exp_" + name);
    const auto manifest = run(valid(doc), {2, dir});
    EXPECT_EQ(manifest.files, files) << name;
  }
  const json p = json::parse(slurp(scratch("x").parent_path() / "exp_pressure" / "pressure.csv"),
                             nullptr, false);
  EXPECT_TRUE(p.is_discarded());  // CSV, not JSON
  const std::string bowen = slurp(scratch("x").parent_path() / "exp_bowen" / "bowen.csv");
  const auto at = bowen.find("bowen_dimension,");
  ASSERT_NE(at, std::string::npos) << bowen;
  EXPECT_NEAR(std::stod(bowen.substr(at + 16)), std::log(2.0), 1e-9);
}

TEST(ThreadsTest, FlagBeatsEnvironment) {
  ::setenv("EMERGENCE_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(std::nullopt), 3u);
  EXPECT_EQ(resolve_threads(5u), 5u);
  ::setenv("EMERGENCE_THREADS", "zero", 1);
  EXPECT_THROW(resolve_threads(std::nullopt), Error);
  ::unsetenv("EMERGENCE_THREADS");
  EXPECT_GE(resolve_threads(std::nullopt), 1u);
}

#ifdef ELAB_CLI_BINARY
int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(BinaryTest, SubcommandsAndExitCodes) {
  const fs::path dir = scratch("binary");
  fs::create_directories(dir);
  const std::string exe = ELAB_CLI_BINARY;
  std::ofstream(dir / "ok.json") << json{{"space", kFull2}, {"experiment", "entropy"}}.dump();
  std::ofstream(dir / "bad.json")
      << json{{"space", kFull2}, {"experiment", "pressure"}, {"output_dir", (dir / "bad").string()}}.dump();
  const std::string quiet = " >/dev/null 2>&1";
  EXPECT_EQ(shell(exe + " validate --config " + (dir / "ok.json").string() + quiet), 0);
  EXPECT_EQ(shell(exe + " validate --config " + (dir / "bad.json").string() + quiet), 2);
  EXPECT_EQ(shell(exe + " entropy --threads 2 --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "out").string() + quiet),
            0);
  EXPECT_TRUE(fs::exists(dir / "out" / "entropy.csv"));
  // Subcommand and config disagree.
  EXPECT_EQ(shell(exe + " pressure --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "mismatch").string() + quiet),
            2);
  EXPECT_EQ(listing(dir / "mismatch"), (std::vector<std::string>{"error.json"}));
  // Invalid config: the error lands in the config's own output_dir.
  EXPECT_EQ(shell(exe + " pressure --config " + (dir / "bad.json").string() + quiet), 2);
  const json err = json::parse(slurp(dir / "bad" / "error.json"));
  EXPECT_EQ(err["kind"], "config");
  EXPECT_NE(err["detail"].get<std::string>().find("/parameters/table"), std::string::npos);
  EXPECT_NE(shell(exe + " nonsense --config x" + quiet), 0);
}
#endif

}  // namespace
}  // namespace elab::cli
