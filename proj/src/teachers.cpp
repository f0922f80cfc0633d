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

#include "tgrl/teachers.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace tgrl {

std::vector<int> goal_distances(const NavigationProblem& nav) {
  // Reverse edges, then BFS outwards from every goal node.
  std::vector<std::vector<int>> predecessors(static_cast<std::size_t>(nav.num_nodes));
  for (int n = 0; n < nav.num_nodes; ++n) {
    for (int a = 0; a < nav.num_actions; ++a) {
      const int s = nav.successor[static_cast<std::size_t>(n * nav.num_actions + a)];
      if (s >= 0 && s != n) predecessors[static_cast<std::size_t>(s)].push_back(n);
    }
  }
  std::vector<int> dist(static_cast<std::size_t>(nav.num_nodes), -1);
  std::queue<int> frontier;
  for (int n = 0; n < nav.num_nodes; ++n) {
    if (nav.goal[static_cast<std::size_t>(n)]) {
      dist[static_cast<std::size_t>(n)] = 0;
      frontier.push(n);
    }
  }
  while (!frontier.empty()) {
    const int n = frontier.front();
    frontier.pop();
    for (int p : predecessors[static_cast<std::size_t>(n)]) {
      if (dist[static_cast<std::size_t>(p)] >= 0) continue;
      dist[static_cast<std::size_t>(p)] = dist[static_cast<std::size_t>(n)] + 1;
      frontier.push(p);
    }
  }
  return dist;
}

ShortestPathTeacher::ShortestPathTeacher(std::shared_ptr<const NavigableEnvironment> prototype,
                                         double eps_smooth)
    : prototype_(std::move(prototype)), eps_smooth_(eps_smooth) {
  if (!prototype_) throw std::invalid_argument("ShortestPathTeacher: null environment");
  if (!(eps_smooth > 0.0 && eps_smooth < 0.5))
    throw std::invalid_argument("ShortestPathTeacher: eps_smooth must lie in (0, 0.5)");
}

int ShortestPathTeacher::greedy_action(const ObsVector& privileged_obs) const {
  const NavigationProblem nav = prototype_->navigation(privileged_obs);
  const std::vector<int> dist = goal_distances(nav);
  const int here = dist[static_cast<std::size_t>(nav.current)];
  if (here < 0) throw std::runtime_error(prototype_->spec().name + ": goal unreachable");
  for (int a = 0; a < nav.num_actions; ++a) {
    const int s = nav.successor[static_cast<std::size_t>(nav.current * nav.num_actions + a)];
    if (s >= 0 && dist[static_cast<std::size_t>(s)] == here - 1) return a;
  }
  // Only reachable when the agent already stands on a goal node.
  return 0;
}

Eigen::VectorXd ShortestPathTeacher::action_probs(const ObsVector& privileged_obs) const {
  const int n = num_actions();
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(n, eps_smooth_ / n);
  probs[greedy_action(privileged_obs)] += 1.0 - eps_smooth_;
  return probs;
}

SuboptimalTeacher::SuboptimalTeacher(std::shared_ptr<const TeacherPolicy> base, double corruption)
    : base_(std::move(base)), corruption_(corruption) {
  if (!base_) throw std::invalid_argument("SuboptimalTeacher: null base");
  if (!(corruption >= 0.0 && corruption <= 1.0))
    throw std::invalid_argument("SuboptimalTeacher: corruption must lie in [0, 1]");
}

Eigen::VectorXd SuboptimalTeacher::action_probs(const ObsVector& privileged_obs) const {
  Eigen::VectorXd probs = base_->action_probs(privileged_obs);
  if (corruption_ == 0.0) return probs;
  const double uniform = 1.0 / static_cast<double>(probs.size());
  return ((1.0 - corruption_) * probs.array() + corruption_ * uniform).matrix();
}

std::shared_ptr<const ShortestPathTeacher> shortest_path_teacher(const NavigableEnvironment& env,
                                                                 double eps_smooth) {
  std::shared_ptr<const NavigableEnvironment> proto(
      static_cast<NavigableEnvironment*>(env.clone().release()));
  return std::make_shared<const ShortestPathTeacher>(std::move(proto), eps_smooth);
}

double teacher_logprob(const TeacherPolicy& teacher, const ObsVector& privileged_obs, int action) {
  const Eigen::VectorXd probs = teacher.action_probs(privileged_obs);
  if (action < 0 || action >= probs.size())
    throw std::out_of_range("teacher_logprob: action out of range");
  return std::log(probs[action]);
}

RolloutStats rollout_teacher(const TeacherPolicy& teacher, const Environment& env, int episodes,
                             std::uint64_t seed) {
  RolloutStats stats;
  auto sim = env.clone();
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Rng rng = make_rng(seed, "teacher.rollout.actions", static_cast<std::uint64_t>(e));
    Transition tr = sim->reset(derive_seed(seed, "teacher.rollout.env", static_cast<std::uint64_t>(e)));
    double ret = 0.0;
    while (!tr.done) {
      tr = sim->step(sample_categorical(teacher.action_probs(tr.privileged_obs), rng));
      ret += tr.reward;
    }
    ++stats.episodes;
    if (tr.outcome == Outcome::Success) ++stats.successes;
    total += ret;
  }
  stats.mean_return = episodes ? total / episodes : 0.0;
  return stats;
}

CalibrationResult calibrate_suboptimal(std::shared_ptr<const TeacherPolicy> base,
                                       double target_success, const Environment& env,
                                       std::uint64_t seed, int episodes, double tolerance) {
  if (!(target_success >= 0.0 && target_success <= 1.0))
    throw std::invalid_argument("calibrate_suboptimal: target_success must lie in [0, 1]");
  CalibrationResult result;
  // Common random numbers across probes keep the measured curve close to
  // monotone; a violation triggers a larger sample.
  auto measure = [&](double p, int n) {
    auto teacher = std::make_shared<const SuboptimalTeacher>(base, p);
    ++result.evaluations;
    return std::pair{teacher, rollout_teacher(*teacher, env, n, seed).success_rate()};
  };

  constexpr int kMaxRetries = 3;
  constexpr int kMaxBisections = 40;
  int n = episodes;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt, n *= 2) {
    auto [t_lo, s_lo] = measure(0.0, n);
    if (target_success > s_lo + tolerance)
      throw std::invalid_argument("calibrate_suboptimal: target exceeds the base teacher's success");
    if (std::abs(s_lo - target_success) <= tolerance) return {t_lo, s_lo, result.evaluations};
    auto [t_hi, s_hi] = measure(1.0, n);
    if (std::abs(s_hi - target_success) <= tolerance) return {t_hi, s_hi, result.evaluations};
    if (target_success < s_hi - tolerance)
      throw std::invalid_argument("calibrate_suboptimal: target below the fully corrupted teacher");
    double lo = 0.0, hi = 1.0;
    bool monotone = true;
    for (int i = 0; i < kMaxBisections; ++i) {
      const double mid = 0.5 * (lo + hi);
      auto [t_mid, s_mid] = measure(mid, n);
      if (std::abs(s_mid - target_success) <= tolerance) return {t_mid, s_mid, result.evaluations};
      if (s_mid > s_lo + tolerance || s_mid < s_hi - tolerance) {
        monotone = false;
        break;
      }
      if (s_mid > target_success) {
        lo = mid;
        s_lo = s_mid;
      } else {
        hi = mid;
        s_hi = s_mid;
      }
    }
    if (monotone) break;
  }
  throw std::runtime_error("calibrate_suboptimal: bisection did not reach the target");
}

}  // namespace tgrl
