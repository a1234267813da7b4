// Copyright 2026 The tcrystal Authors
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

// tcrystal <run|validate> --config FILE [--seed N] [--out DIR] [--workers K]
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
// The output directory is --out, else $TCRYSTAL_OUT, else the config's
// output_dir.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tcrystal/config.hpp"
#include "tcrystal/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int workers = 1;
};

void add_common(CLI::App* cmd, Options& o, bool runtime) {
  cmd->add_option("--config", o.config, "experiment configuration (JSON)")->required();
  if (!runtime) return;
  cmd->add_option("--seed", o.seed, "override the master seed");
  cmd->add_option("--out", o.out, "output directory (overrides TCRYSTAL_OUT and output_dir)");
  cmd->add_option("--workers", o.workers, "concurrent trajectories in sweeps")->check(CLI::Range(1, 256));
}

int validate(const Options& o) {
  const auto cfg = tcrystal::load_config(o.config);
  std::cout << "ok: " << o.config << " (" << tcrystal::to_string(cfg.experiment) << ")\n";
  for (const auto& w : tcrystal::config_warnings(cfg)) std::cout << "warning: " << w << '\n';
  return kExitOk;
}

int run(const Options& o) {
  auto cfg = tcrystal::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("TCRYSTAL_OUT"); env && *env) dir = env;
  if (o.out) dir = *o.out;

  for (const auto& w : tcrystal::config_warnings(cfg)) std::cerr << "warning: " << w << '\n';
  const auto start = std::chrono::steady_clock::now();
  const auto res = tcrystal::run_experiment(cfg, o.workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  tcrystal::write_outputs(res, cfg, dir, wall, o.workers);
  std::cout << "wrote " << res.files.size() + 1 << " files to " << dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergent time periodicity in few-qubit open systems"};
  app.set_version_flag("--version", std::string(tcrystal::kVersion));
  app.require_subcommand(1);
  Options opts;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
  auto* val_cmd = app.add_subcommand("validate", "check a config file and print physical-range warnings");
  add_common(run_cmd, opts, true);
  add_common(val_cmd, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return run_cmd->parsed() ? run(opts) : validate(opts);
  } catch (const tcrystal::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tcrystal::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const tcrystal::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tcrystal::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
