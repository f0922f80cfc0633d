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

#ifndef TGRL_CONFIG_HPP
#define TGRL_CONFIG_HPP

#include "tgrl/dual.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tgrl {

enum class Algorithm { Tgrl, Il, Cosil, Advisor, Pbrs, RlOnly };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

enum class PerfDiffCritic { Own, Shared };

/// Thrown for malformed or out-of-range configuration; `field()` names the
/// offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  std::string env = "tiger_door";
  Algorithm algorithm = Algorithm::Tgrl;
  std::uint64_t seed = 0;

  double alpha = 3.0;
  double lambda_init = 9.0;
  double mu = 3e-3;
  double c_clip = 4.0;
  double temperature = 0.05;
  double epsilon_greedy = 0.05;
  int window = 8;
  double gamma = 0.9;
  double lr = 3e-4;
  int batch_size = 32;
  int n_collect = 5;
  int n_update = 500;
  int buffer_capacity = 200000;
  BufferMode buffer_mode = BufferMode::Joint;
  double teacher_target_success = 1.0;  // below 1 calibrates a corrupted teacher
  double eps_smooth = 0.02;
  std::vector<int> hidden{128, 128};
  double tau = 0.005;

  int iterations = 100;
  int eval_episodes = 100;
  int eval_every = 5;
  std::optional<double> fixed_coefficient;

  int perf_diff_batch = 1024;
  PerfDiffCritic perf_diff_critic = PerfDiffCritic::Own;
  PerfDiffMethod perf_diff_method = PerfDiffMethod::ReplayAdvantage;

  double cosil_target = -1.0;
  double cosil_alpha_init = 1.0;
  double cosil_lr = 0.05;
  double advisor_beta = 1.0;
  int pbrs_il_iterations = 20;
  int pbrs_value_episodes = 200;
  int pbrs_value_steps = 2000;

  int lava_rivers = 1;
  std::string output;      // CSV path; empty writes nothing
  std::string checkpoint;  // written after the last iteration when set

  /// Throws ConfigError naming the first field outside its range.
  void validate() const;

  /// Sets one field from its textual value. Throws ConfigError for unknown
  /// keys and unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Current value of a field in the same textual form `set` accepts.
  std::string get(std::string_view key) const;

  static const std::vector<std::string>& keys();
};

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Unknown keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Applies a `key=value` override.
void apply_override(RunConfig& config, std::string_view assignment);

std::string to_string(BufferMode mode);

}  // namespace tgrl

#endif  // TGRL_CONFIG_HPP
