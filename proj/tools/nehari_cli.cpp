// Copyright 2026 The nehari-dp Authors
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
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace nehari;
  CLI::App app{"Double-phase Nehari solver on periodic tori"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides o;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  int trials = 0;
  std::vector<std::string> faults;
  std::string field;

  app.add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides [run] seed)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides [output] dir)");
  auto* thr_opt = app.add_option("--threads", threads, "worker threads for multistart")->check(CLI::PositiveNumber);
  app.add_option("--fault-inject", faults, "test-only KEY=VAL overrides (r_q)");

  auto* verify = app.add_subcommand("verify", "run the function-space property suite");
  auto* trials_opt = verify->add_option("--trials", trials, "property trials")->check(CLI::PositiveNumber);
  auto* solve = app.add_subcommand("solve", "two-solution experiment at [problem] lambda");
  auto* sweep = app.add_subcommand("sweep", "both branches over the [sweep] lambda grid");
  auto* project = app.add_subcommand("project", "Nehari projection of a stored field");
  project->add_option("--field", field, "nehari-field v1 file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kError;
  }

  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.out = out;
  if (*thr_opt) o.threads = threads;
  if (*trials_opt) o.trials = trials;
  for (const auto& f : faults) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--fault-inject expects KEY=VAL, got '" << f << "'\n";
      return cli::kError;
    }
    o.faults[f.substr(0, eq)] = f.substr(eq + 1);
  }

  try {
    const cli::Session s = cli::open_session(load_config(config_path), o);
    if (*verify) return cli::cmd_verify(s);
    if (*solve) return cli::cmd_solve(s);
    if (*sweep) return cli::cmd_sweep(s);
    return cli::cmd_project(s, field);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kError;
  }
}
