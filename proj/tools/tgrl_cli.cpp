// Copyright 2026 The tgrl-gridworld Authors. All rights reserved.
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


// Command-line front end: run, sweep, eval and map.

#include "tgrl/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

tgrl::RunConfig build_config(const std::string& path, const std::vector<std::string>& overrides) {
  tgrl::RunConfig config = path.empty() ? tgrl::RunConfig{} : tgrl::load_config(path);
  for (const auto& o : overrides) tgrl::apply_override(config, o);
  config.validate();
  return config;
}

int report(const tgrl::RunResult& r) {
  if (!r.ok) {
    std::cerr << "tgrl: training aborted: " << r.error << '\n';
    return 3;
  }
  std::cerr << "final success " << r.final_success() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teacher-guided reinforcement learning on partially observed gridworlds"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Train one configuration");
  run_cmd->add_option("-c,--config", config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--override", overrides, "key=value override, repeatable");
  run_cmd->add_flag("-q,--quiet", quiet, "Do not echo metric rows");

  std::string field;
  std::vector<std::string> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train once per value of one field");
  sweep_cmd->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--override", overrides, "key=value override, repeatable");
  sweep_cmd->add_option("-f,--field", field, "Field to sweep")->required();
  sweep_cmd->add_option("-v,--values", values, "Values")->required();
  sweep_cmd->add_flag("-q,--quiet", quiet, "Do not echo metric rows");

  std::string checkpoint;
  int episodes = 100;
  std::uint64_t eval_seed = 12345;
  auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval_cmd->add_option("checkpoint", checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("-n,--episodes", episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  eval_cmd->add_option("-s,--seed", eval_seed, "Evaluation seed");

  std::string env_name;
  std::uint64_t map_seed = 0;
  int rivers = 1;
  std::string map_out;
  auto* map_cmd = app.add_subcommand("map", "Print an environment layout");
  map_cmd->add_option("env", env_name, "Environment name")->required();
  map_cmd->add_option("-s,--seed", map_seed, "Reset seed");
  map_cmd->add_option("--rivers", rivers, "Lava rivers")->check(CLI::Range(1, 6));
  map_cmd->add_option("-o,--out", map_out, "Write to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto config = build_config(config_path, overrides);
      return report(tgrl::run(config, quiet ? nullptr : &std::cout));
    }
    if (*sweep_cmd) {
      const auto config = build_config(config_path, overrides);
      const auto result = tgrl::sweep(config, field, values, quiet ? nullptr : &std::cout);
      int failures = 0;
      for (const auto& e : result.entries) {
        std::cerr << field << '=' << e.value << "  success " << e.final_success;
        if (!e.ok) {
          std::cerr << "  FAILED: " << e.error;
          ++failures;
        }
        std::cerr << '\n';
      }
      std::cerr << "best " << result.best << "  mean " << result.mean << '\n';
      return failures ? 3 : 0;
    }
    if (*eval_cmd) {
      const auto loaded = tgrl::load_checkpoint(checkpoint);
      tgrl::RunConfig config;
      config.env = loaded.env;
      config.lava_rivers = loaded.lava_rivers;
      const auto env = tgrl::make_env(config);
      const auto e = tgrl::evaluate(loaded.policy, *env, episodes, eval_seed);
      std::cout << "env " << loaded.env << "  algorithm " << tgrl::algorithm_name(loaded.algorithm)
                << "  episodes " << e.episodes << "  success " << e.success_rate() << "  mean_return "
                << e.mean_return << '\n';
      return 0;
    }
    if (*map_cmd) {
      tgrl::RunConfig config;
      config.set("env", env_name);
      config.lava_rivers = rivers;
      auto env = tgrl::make_env(config);
      env->reset(map_seed);
      if (map_out.empty()) {
        std::cout << env->ascii_map();
      } else {
        std::ofstream out(map_out);
        if (!out) throw std::runtime_error("cannot write " + map_out);
        out << env->ascii_map();
      }
      return 0;
    }
  } catch (const tgrl::ConfigError& e) {
    std::cerr << "tgrl: config error in '" << e.field() << "': " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tgrl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
