// Copyright 2026 The pancake Authors.
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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "scenario.hpp"

namespace pancake::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path example(const std::string& name) { return fs::path(PANCAKE_EXAMPLES_DIR) / name; }

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "pancake_test_cli" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const json& config, const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  return run_scenario(config, o);
}

TEST(Cli, ScenarioNames) {
  EXPECT_EQ(scenario_names().size(), 6u);
}

TEST(Cli, ExampleConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(PANCAKE_EXAMPLES_DIR)) {
    const json j = load_config(entry.path());
    EXPECT_TRUE(j.contains("scenario")) << entry.path();
  }
  EXPECT_THROW(load_config(example("missing.json")), ConfigError);
}

TEST(Cli, RollTrajectoryIsDeterministic) {
  const json cfg = load_config(example("roll_disc.json"));
  const fs::path a = fresh_dir("roll_a"), b = fresh_dir("roll_b");
  const RunResult ra = run(cfg, a);
  run(cfg, b);
  EXPECT_EQ(ra.exit_code, 0);
  ASSERT_EQ(ra.outputs.size(), 4u);
  EXPECT_EQ(ra.outputs.back(), "manifest.json");
  for (const auto& f : {"trajectory.csv", "events.jsonl"}) {
    const std::string x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
    EXPECT_EQ(x.find('\r'), std::string::npos);
  }
  EXPECT_GT(ra.summary.at("crossings").get<long>(), 0);
  EXPECT_LT(std::abs(ra.summary.at("energy_drift").get<double>()), 1e-6);
}

TEST(Cli, ManifestReproducesRun) {
  const fs::path a = fresh_dir("manifest_a"), b = fresh_dir("manifest_b");
  run(load_config(example("billiard_disc.json")), a);
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest.contains("wall_time_s"));
  EXPECT_EQ(manifest.at("outputs").size(), 2u);
  const json again = load_config(a / "manifest.json");
  EXPECT_EQ(again, manifest.at("config"));
  run(again, b);
  EXPECT_EQ(slurp(a / "orbit.csv"), slurp(b / "orbit.csv"));
  EXPECT_EQ(slurp(a / "orbit.csv").substr(0, 28), "n,x1,x2,u1,u2,W1,chord_dist\n");
}

TEST(Cli, RejectsUnknownKeysNamingTheField) {
  json cfg = load_config(example("roll_disc.json"));
  cfg["initial"]["velocity"] = {1, 0, 0};
  try {
    run(cfg, fresh_dir("unknown"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("initial.velocity"), std::string::npos) << e.what();
  }
  json top = load_config(example("billiard_disc.json"));
  top["colour"] = "red";
  EXPECT_THROW(run(top, fresh_dir("unknown2")), ConfigError);
  json bad_scenario = {{"scenario", "Nope"}};
  EXPECT_THROW(run(bad_scenario, fresh_dir("unknown3")), ConfigError);
}

TEST(Cli, FieldValidation) {
  json cfg = load_config(example("roll_disc.json"));
  cfg["h"] = -1.0;
  EXPECT_THROW(run(cfg, fresh_dir("v1")), ConfigError);
  cfg = load_config(example("roll_disc.json"));
  cfg["r"] = 5.0;  // larger than the disc
  EXPECT_THROW(run(cfg, fresh_dir("v2")), ConfigError);
  cfg = load_config(example("roll_disc.json"));
  cfg["initial"]["u"] = {0.0, 0.0, 1.0};  // normal velocity
  EXPECT_THROW(run(cfg, fresh_dir("v3")), ConfigError);
  cfg = load_config(example("roll_disc.json"));
  cfg["initial"]["x"] = {0.2, 0.3};
  EXPECT_THROW(run(cfg, fresh_dir("v4")), ConfigError);
  cfg = load_config(example("roll_disc.json"));
  cfg["eta"] = 1.5;
  EXPECT_THROW(run(cfg, fresh_dir("v5")), ConfigError);
  cfg = load_config(example("roll_disc.json"));
  cfg["eta"] = {0.1, 0.2};  // lists only for FigureSinai
  EXPECT_THROW(run(cfg, fresh_dir("v6")), ConfigError);
}

TEST(Cli, EtaAndGammaBAreExclusive) {
  json cfg = load_config(example("billiard_disc.json"));
  cfg["eta"] = 0.3;
  EXPECT_THROW(run(cfg, fresh_dir("excl1")), ConfigError);
  cfg.erase("eta");
  cfg.erase("gamma_b");
  EXPECT_THROW(run(cfg, fresh_dir("excl2")), ConfigError);
  // γ_b = √(2/5) maps to η_r of the solid ball.
  const RunResult r = run(load_config(example("billiard_disc.json")), fresh_dir("excl3"));
  EXPECT_NEAR(r.summary.at("eta").get<double>(), 0.3590170359713761, 1e-14);
}

TEST(Cli, FigureDiscCausticsTwoClusters) {
  const fs::path d = fresh_dir("caustics");
  const RunResult r = run(load_config(example("figure_disc_caustics.json")), d);
  const json c = json::parse(slurp(d / "caustics.json"));
  ASSERT_EQ(c.at("count").get<int>(), 2);
  EXPECT_EQ(c.at("clusters")[0].at("multiplicity").get<int>() +
                c.at("clusters")[1].at("multiplicity").get<int>(),
            501);
  ASSERT_TRUE(c.contains("rolling"));
  for (const auto& cl : c.at("rolling").at("clusters")) {
    EXPECT_GT(cl.at("rolling_segments").get<int>(), 0);
    EXPECT_LT(cl.at("max_deviation").get<double>(), 1e-2);
  }
  EXPECT_TRUE(fs::exists(d / "disc_orbit.csv"));
  EXPECT_TRUE(fs::exists(d / "rolling_crossings.csv"));
  EXPECT_EQ(r.exit_code, 0);
}

TEST(Cli, HalfPlaneConvergenceErrorsVanish) {
  const fs::path d = fresh_dir("halfplane");
  run(load_config(example("edge_halfplane.json")), d);
  const json s = json::parse(slurp(d / "convergence.json"));
  ASSERT_EQ(s.at("rows").size(), 4u);
  for (const auto& row : s.at("rows")) {
    EXPECT_LE(row.at("error").get<double>(), 1e-8);
  }
  std::istringstream csv(slurp(d / "convergence.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 5);
}

TEST(Cli, DiscConvergenceDecreases) {
  const fs::path d = fresh_dir("disc_conv");
  const RunResult r = run(load_config(example("edge_disc.json")), d);
  const json& rows = r.summary.at("rows");
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].at("error").get<double>(), rows[i - 1].at("error").get<double>());
  }
  EXPECT_GT(r.summary.at("fitted_rate").get<double>(), 0.5);
}

TEST(Cli, OracleCheckPasses) {
  const fs::path d = fresh_dir("oracle");
  const RunResult r = run(load_config(example("oracle_check.json")), d);
  EXPECT_EQ(r.exit_code, 0) << r.summary.dump(2);
  const std::string csv = slurp(d / "oracle_check.csv");
  EXPECT_EQ(csv.rfind("check,error,tolerance,pass\n", 0), 0u);
  EXPECT_EQ(csv.find(",false"), std::string::npos) << csv;
}

TEST(Cli, OracleCheckReportsFailure) {
  json cfg = load_config(example("oracle_check.json"));
  cfg["h"] = 0.2;  // far too coarse for the tolerances
  const RunResult r = run(cfg, fresh_dir("oracle_fail"));
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, FigureSinaiWritesOneCsvPerEta) {
  json cfg = load_config(example("figure_sinai.json"));
  cfg["T"] = 5.0;
  const fs::path d = fresh_dir("sinai");
  const RunResult r = run(cfg, d);
  EXPECT_TRUE(fs::exists(d / "sinai_eta_0.05.csv"));
  EXPECT_TRUE(fs::exists(d / "sinai_eta_0.62.csv"));
  EXPECT_TRUE(fs::exists(d / "sinai_paths.dat"));
  ASSERT_EQ(r.summary.at("runs").size(), 2u);
  for (const auto& run : r.summary.at("runs")) {
    EXPECT_LT(std::abs(run.at("energy_drift").get<double>()), 1e-6);
  }
  const std::string dat = slurp(d / "sinai_paths.dat");
  EXPECT_NE(dat.find("\n\n\n"), std::string::npos);  // block separator
  cfg["plate"] = {{"family", "Disc"}, {"R", 1.0}};
  EXPECT_THROW(run(cfg, fresh_dir("sinai_bad")), ConfigError);
}

}  // namespace
}  // namespace pancake::cli
