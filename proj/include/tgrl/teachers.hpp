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

#ifndef TGRL_TEACHERS_HPP
#define TGRL_TEACHERS_HPP

#include "tgrl/gridworld.hpp"

#include <memory>

namespace tgrl {

/// Teacher acting on privileged observations. Immutable once built, so one
/// instance can be shared read-only by any number of runs.
class TeacherPolicy {
 public:
  virtual ~TeacherPolicy() = default;
  virtual Eigen::VectorXd action_probs(const ObsVector& privileged_obs) const = 0;
  virtual int num_actions() const = 0;
};

/// Breadth-first distance field to the goal; probability 1 - eps_smooth on
/// the lowest-index distance-decreasing action, eps_smooth spread uniformly.
/// Every action therefore keeps probability >= eps_smooth / num_actions.
class ShortestPathTeacher final : public TeacherPolicy {
 public:
  ShortestPathTeacher(std::shared_ptr<const NavigableEnvironment> prototype, double eps_smooth);

  Eigen::VectorXd action_probs(const ObsVector& privileged_obs) const override;
  int num_actions() const override { return prototype_->spec().num_actions; }
  double eps_smooth() const { return eps_smooth_; }

  /// Action the teacher puts its mass on. Throws std::runtime_error when the
  /// goal cannot be reached from the current node.
  int greedy_action(const ObsVector& privileged_obs) const;

 private:
  std::shared_ptr<const NavigableEnvironment> prototype_;
  double eps_smooth_;
};

/// Per-step corruption: with probability p the teacher's distribution is
/// replaced by the uniform one. action_probs returns the resulting marginal
/// (1 - p) * base + p * uniform, so sampling from it reproduces the corrupted
/// behaviour exactly and p = 0 is the base teacher.
class SuboptimalTeacher final : public TeacherPolicy {
 public:
  SuboptimalTeacher(std::shared_ptr<const TeacherPolicy> base, double corruption);

  Eigen::VectorXd action_probs(const ObsVector& privileged_obs) const override;
  int num_actions() const override { return base_->num_actions(); }
  double corruption() const { return corruption_; }

 private:
  std::shared_ptr<const TeacherPolicy> base_;
  double corruption_;
};

/// Breadth-first distance (in steps) from every node to the nearest goal;
/// -1 where no goal is reachable. Fatal moves are never taken.
std::vector<int> goal_distances(const NavigationProblem& nav);

std::shared_ptr<const ShortestPathTeacher> shortest_path_teacher(const NavigableEnvironment& env,
                                                                 double eps_smooth = 0.02);

/// Natural log of the teacher's probability for `action`. Finite for every
/// smoothed teacher.
double teacher_logprob(const TeacherPolicy& teacher, const ObsVector& privileged_obs, int action);

struct RolloutStats {
  int episodes = 0;
  int successes = 0;
  double mean_return = 0.0;
  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

/// Monte Carlo rollouts sampling actions from the teacher's distribution.
RolloutStats rollout_teacher(const TeacherPolicy& teacher, const Environment& env, int episodes,
                             std::uint64_t seed);

struct CalibrationResult {
  std::shared_ptr<const SuboptimalTeacher> teacher;
  double measured_success = 0.0;
  int evaluations = 0;
};

/// Bisection on the corruption probability until the measured success rate
/// (Monte Carlo, `episodes` rollouts) lies within `tolerance` of the target.
/// Throws std::invalid_argument if the target is outside [0, base success]
/// and std::runtime_error if bisection does not settle within its retries.
CalibrationResult calibrate_suboptimal(std::shared_ptr<const TeacherPolicy> base,
                                       double target_success, const Environment& env,
                                       std::uint64_t seed, int episodes = 1000,
                                       double tolerance = 0.02);

}  // namespace tgrl

#endif  // TGRL_TEACHERS_HPP
