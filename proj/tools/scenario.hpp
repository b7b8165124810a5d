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

// Config-driven scenarios behind the `pancake` command-line tool.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pancake/errors.hpp"

namespace pancake::cli {

/// Config validation failure; the message names the offending field.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Simulation failure, prefixed with the scenario name.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool quiet = true;
};

struct RunResult {
  /// 0 on success, 1 when a scenario's own checks fail (OracleCheck).
  int exit_code = 0;
  /// Files written, relative to out_dir; manifest.json last.
  std::vector<std::string> outputs;
  nlohmann::json summary;
};

/// Scenario names accepted in the "scenario" field.
const std::vector<std::string>& scenario_names();

/// Parses a config file. A run manifest is accepted too: its "config"
/// member is returned. Throws ConfigError on unreadable or invalid JSON.
nlohmann::json load_config(const std::filesystem::path& path);

/// Validates `config`, runs the scenario, writes its outputs and
/// manifest.json into options.out_dir (created if missing).
RunResult run_scenario(const nlohmann::json& config, const RunOptions& options);

}  // namespace pancake::cli
