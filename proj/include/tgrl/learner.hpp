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

#ifndef TGRL_LEARNER_HPP
#define TGRL_LEARNER_HPP

#include "tgrl/config.hpp"
#include "tgrl/dual.hpp"
#include "tgrl/mlp.hpp"
#include "tgrl/replay.hpp"
#include "tgrl/teachers.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <vector>

namespace tgrl {

/// Read-only Boltzmann policy over a weighted sum of critics:
/// Q(h) = sum_i weight_i * net_i(h), pi = softmax(Q / temperature).
class PolicySnapshot {
 public:
  PolicySnapshot() = default;
  PolicySnapshot(std::vector<Mlp<float>> nets, std::vector<double> weights, double temperature,
                 int window, int obs_dim, int num_actions);

  Eigen::MatrixXd q_values(const Eigen::MatrixXf& histories) const;
  Eigen::VectorXd q_values(const Eigen::VectorXf& history) const;
  Eigen::VectorXd action_probs(const Eigen::VectorXf& history) const;
  PolicyValues values(const Eigen::MatrixXf& histories) const;
  /// Argmax, ties to the lowest index.
  int greedy(const Eigen::VectorXf& history) const;

  int window() const { return window_; }
  int obs_dim() const { return obs_dim_; }
  int num_actions() const { return num_actions_; }
  double temperature() const { return temperature_; }
  const std::vector<Mlp<float>>& nets() const { return nets_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<Mlp<float>> nets_;
  std::vector<double> weights_;
  double temperature_ = 1.0;
  int window_ = 1;
  int obs_dim_ = 0;
  int num_actions_ = 0;
};

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  double mean_return = 0.0;
  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

/// Greedy rollouts on episodes seeded from the "eval" stream of `seed`.
/// Throws std::invalid_argument when episodes < 1.
EvalResult evaluate(const PolicySnapshot& policy, const Environment& env, int episodes,
                    std::uint64_t seed);

struct IterationMetrics {
  int iteration = 0;
  long env_steps = 0;
  double lambda = 0.0;
  double effective_coef = 0.0;
  std::optional<double> perf_diff;  // only for the dual learner
  double q_r_loss = 0.0;
  double q_e_loss = 0.0;
  double mean_cross_entropy = 0.0;  // mean -r_E over this iteration's main-policy steps
  int episodes = 0;
};

/// Environment named by the config (honours lava_rivers).
std::unique_ptr<NavigableEnvironment> make_env(const RunConfig& config);

/// Shortest-path teacher, corrupted to the configured success rate when it
/// is below one.
std::shared_ptr<const TeacherPolicy> make_teacher(const RunConfig& config,
                                                  const NavigableEnvironment& env);

/// Off-policy learner shared by every algorithm. Owns its critics, replay
/// buffer and random streams; nothing outside iterate() mutates it.
///
/// Critics: q_r (task reward, bootstrapped under pi), q_e (imitation reward,
/// under pi), q_aux (task reward, under pi_R). Which ones train and how pi
/// weighs them depends on the algorithm.
class Learner {
 public:
  explicit Learner(RunConfig config);
  Learner(RunConfig config, std::shared_ptr<const NavigableEnvironment> env,
          std::shared_ptr<const TeacherPolicy> teacher);

  /// One collect / update / coefficient-update round.
  IterationMetrics iterate();

  /// Rolls out one episode with the given collector's exploratory policy
  /// and stores it.
  Trajectory collect(Collector who);

  PolicySnapshot main_policy() const;
  PolicySnapshot aux_policy() const;
  bool has_aux_policy() const { return config_.algorithm == Algorithm::Tgrl; }

  /// Performance-difference estimate for the current critics.
  PerfDiffEstimate estimate_perf_diff();

  const RunConfig& config() const { return config_; }
  const DualState& dual() const { return dual_; }
  double cosil_alpha() const { return cosil_alpha_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const NavigableEnvironment& env() const { return *env_; }
  const TeacherPolicy& teacher() const { return *teacher_; }
  int iteration() const { return iteration_; }
  long env_steps() const { return env_steps_; }
  /// Weights of (q_r, q_e) in pi's action values.
  std::pair<double, double> main_weights() const;
  bool pbrs_shaping() const { return pbrs_stage_ == 2; }

  const Mlp<float>& q_r() const { return q_r_; }
  const Mlp<float>& q_e() const { return q_e_; }
  const Mlp<float>& q_aux() const { return q_aux_; }

 private:
  struct Losses {
    double q_r = 0.0;
    double q_e = 0.0;
  };

  Losses update_step();
  void fit_pbrs_value();
  Eigen::VectorXf shaped_rewards(const ReplayBatch& b) const;
  PolicyValues main_values(const Eigen::MatrixXf& histories) const;
  PolicyValues aux_values(const Eigen::MatrixXf& histories) const;

  RunConfig config_;
  std::shared_ptr<const NavigableEnvironment> env_;
  std::shared_ptr<const TeacherPolicy> teacher_;
  std::unique_ptr<Environment> sim_;
  int obs_dim_;
  int num_actions_;
  ReplayBuffer buffer_;
  DualState dual_;
  double cosil_alpha_;

  Mlp<float> q_r_, q_e_, q_aux_, imitation_, value_;
  TargetCopy<float> q_r_target_, q_e_target_, q_aux_target_;
  AdamState<float> q_r_opt_, q_e_opt_, q_aux_opt_, imitation_opt_, value_opt_;

  Rng collect_rng_;
  Rng update_rng_;
  Rng diff_rng_;
  std::deque<double> recent_main_returns_;
  std::deque<double> recent_aux_returns_;
  int iteration_ = 0;
  long env_steps_ = 0;
  long episodes_ = 0;
  int pbrs_stage_ = 0;  // 0: not pbrs, 1: imitation stage, 2: shaped stage
};

}  // namespace tgrl

#endif  // TGRL_LEARNER_HPP
