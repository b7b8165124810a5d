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


// pancake: runs one JSON-configured scenario and writes its outputs.
// Exit codes: 0 success, 1 scenario checks failed, 2 config error,
// 3 simulation error.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pancake/version.hpp"
#include "scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rolling-pancake and no-slip billiard scenarios"};
  app.set_version_flag("--version", std::string(pancake::version()));
  std::filesystem::path config_path;
  std::string out_dir;
  bool verbose = false;
  app.add_option("--config", config_path, "Scenario config (JSON) or a previous manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Output directory (overrides output_dir in the config)");
  app.add_flag("-v,--verbose", verbose, "Print the run summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help/--version succeed; any other command-line problem is a config error.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  namespace cli = pancake::cli;
  try {
    nlohmann::json config = cli::load_config(config_path);
    cli::RunOptions options;
    options.quiet = !verbose;
    if (!out_dir.empty()) {
      options.out_dir = out_dir;
    } else if (config.is_object() && config.contains("output_dir")) {
      if (!config["output_dir"].is_string()) throw cli::ConfigError("output_dir: expected a string");
      options.out_dir = config["output_dir"].get<std::string>();
    }
    const cli::RunResult result = cli::run_scenario(config, options);
    if (verbose) std::cout << result.summary.dump(2) << "\n";
    for (const auto& f : result.outputs) {
      std::cout << (options.out_dir / f).string() << "\n";
    }
    if (result.exit_code != 0) std::cerr << "pancake: scenario checks failed\n";
    return result.exit_code;
  } catch (const cli::ConfigError& e) {
    std::cerr << fmt::format("pancake: config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("pancake: simulation error: {}\n", e.what());
    return 3;
  }
}
