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

// Experiment plumbing: metrics rows, complete runs with periodic greedy
// evaluation, sweeps over one config field, and checkpoints.

#ifndef TGRL_HARNESS_HPP
#define TGRL_HARNESS_HPP

#include "tgrl/learner.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tgrl {

/// One CSV row per iteration. Optional fields are written as empty cells:
/// success rates before the first evaluation, and the dual columns for
/// algorithms without a dual variable.
struct MetricsRow {
  int iteration = 0;
  long env_steps = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<double> success_rate_pi;
  std::optional<double> success_rate_pi_r;
  std::optional<double> mean_return_pi;
  std::optional<double> lambda;
  std::optional<double> effective_coef;
  std::optional<double> perf_diff_estimate;
  double q_r_loss = 0.0;
  double q_e_loss = 0.0;
  double mean_cross_entropy = 0.0;
};

const std::vector<std::string>& metrics_columns();
std::string csv_header();
std::string to_csv(const MetricsRow& row);

struct RunResult {
  std::vector<MetricsRow> rows;
  bool ok = true;
  std::string error;  // set when training aborted
  std::unique_ptr<Learner> learner;

  /// Last evaluated greedy success of pi; 0 when never evaluated.
  double final_success() const;
  /// First iteration whose evaluated pi_R success reaches `threshold`.
  std::optional<int> first_aux_success_at(double threshold) const;
};

/// Trains config.algorithm for config.iterations. Greedy evaluation runs
/// every eval_every iterations and after the last one, on seeds from the
/// "eval" stream (disjoint from training episodes). Rows go to
/// config.output when it is set and to `progress` as they are produced.
/// A non-finite value during training ends the run with a diagnostic row
/// and ok == false; invalid configuration throws ConfigError.
RunResult run(const RunConfig& config, std::ostream* progress = nullptr);

struct SweepEntry {
  std::string value;
  bool ok = true;
  std::string error;
  double final_success = 0.0;
  std::string output;
};

struct SweepResult {
  std::string field;
  std::vector<SweepEntry> entries;
  double best = 0.0;
  double mean = 0.0;
};

/// One independent run per value of `field`. When the base config names an
/// output file, each run writes `<stem>_<field>-<value>.csv` and the summary
/// goes to `<stem>_summary.csv`. Failed runs are recorded and the sweep
/// continues.
SweepResult sweep(const RunConfig& base, const std::string& field,
                  const std::vector<std::string>& values, std::ostream* progress = nullptr);

/// Writes the main policy's networks (binary) and a `<path>.dual` text
/// sidecar with the dual scalars and the policy metadata.
void save_checkpoint(const std::string& path, const Learner& learner);

struct LoadedCheckpoint {
  PolicySnapshot policy;
  DualState dual;
  std::string env;
  int lava_rivers = 1;
  Algorithm algorithm = Algorithm::Tgrl;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace tgrl

#endif  // TGRL_HARNESS_HPP
