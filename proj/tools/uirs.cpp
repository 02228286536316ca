// Copyright 2026 The uirs Authors
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

// uirs: command-line front end for the experiment runner.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "uirs/experiment.hpp"

namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("UIRS_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "uirs: ignoring invalid UIRS_WORKERS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized UIRS estimation of OTOC and unitarity"};
  app.set_version_flag("--version", std::string("uirs ") + uirs::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run a configured experiment");
  run->add_option("--config", config_path, "Path to the JSON config")->required()->check(CLI::ExistingFile);
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads (default: $UIRS_WORKERS or all cores)")
                          ->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "Override master_seed");

  std::uint64_t oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle-check", "Run the theory-oracle invariant suite");
  oracle->add_option("--seed", oracle_seed, "Seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*oracle) {
      return uirs::oracles::report(uirs::oracles::run_all(oracle_seed), std::cout) == 0 ? 0 : 1;
    }
    auto config = uirs::load_config(config_path);
    if (*seed_opt) config.master_seed = seed;
    const std::size_t k = *workers_opt ? workers : default_workers();
    return uirs::run_experiment(config, k, std::cerr);
  } catch (const uirs::ConfigError& e) {
    std::cerr << "uirs: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "uirs: " << e.what() << '\n';
    return 1;
  }
}
