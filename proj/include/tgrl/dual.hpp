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

// Balancing-coefficient machinery: the dual variable, the clipped
// cross-entropy reward, Boltzmann policies over critic values, and the
// replay-based performance-difference estimator.

#ifndef TGRL_DUAL_HPP
#define TGRL_DUAL_HPP

#include "tgrl/replay.hpp"
#include "tgrl/teachers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tgrl {

struct DualState {
  double alpha = 3.0;
  double lambda = 9.0;
  double mu = 3e-3;
  double diff_normalizer = 0.0;  // bias-corrected EMA of |diff|
  double normalizer_decay = 0.99;
  double eps_norm = 1e-3;
  long normalizer_updates = 0;
  bool frozen = false;  // fixed-coefficient ablation

  double effective_coefficient() const { return alpha / (1.0 + lambda); }

  /// State whose effective coefficient is pinned to `coefficient`; requires
  /// 0 < coefficient <= alpha.
  static DualState fixed(double alpha, double coefficient);
};

/// max(log p, -c_clip).
inline double clipped_log(double p, double c_clip) {
  return std::max(std::log(p), -c_clip);
}

/// Clipped log-probability the teacher assigns to `action`; in [-c_clip, 0].
double imitation_reward(const TeacherPolicy& teacher, const ObsVector& privileged_obs, int action,
                        double c_clip);

/// Projected step lambda <- max(0, lambda - mu * normalized_diff). Pure
/// arithmetic; leaves the normalizer alone.
DualState apply_lambda_step(DualState state, double normalized_diff);

enum class PerfDiffMethod { ReplayAdvantage, MonteCarlo };

struct PerfDiffEstimate {
  double value = 0.0;  // estimate of J_R(pi) - J_R(pi_R)
  PerfDiffMethod method = PerfDiffMethod::ReplayAdvantage;
  int samples = 0;
};

/// Folds |diff| into the normalizer, then applies the projected step with the
/// normalized difference. A positive difference (pi ahead of pi_R) lowers
/// lambda and so raises the teacher's weight. Frozen states are returned
/// unchanged. Throws std::domain_error on a non-finite difference.
DualState update_lambda(const DualState& state, const PerfDiffEstimate& diff);

/// Column-wise softmax(q / temperature), computed stably.
Eigen::MatrixXd softmax_columns(const Eigen::Ref<const Eigen::MatrixXd>& q, double temperature);

/// Argmax with ties going to the lowest index.
int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q);

/// Action values and the policy distribution they induce, one column per
/// sample.
struct PolicyValues {
  Eigen::MatrixXd q;
  Eigen::MatrixXd probs;
};

/// Off-policy performance-difference estimate from advantage values at the
/// sampled records:
///   scale * mean_i gamma^{t_i} (A_aux(h_i, a_i) - A_main(h_i, a_i)),
/// A(h, a) = Q(h, a) - sum_b probs(b) Q(h, b). `scale` is the number of
/// records per episode, turning the per-record mean into the per-episode sum
/// the identity is stated for.
PerfDiffEstimate perf_diff_from_values(const PolicyValues& main, const PolicyValues& aux,
                                       std::span<const int> actions,
                                       std::span<const int> timesteps, double gamma, double scale);

using PolicyEvaluator = std::function<PolicyValues(const Eigen::MatrixXf& histories)>;

/// Replay-advantage estimator over a buffer. `batch` <= 0 uses every live
/// record; otherwise `batch` records are drawn with `rng`. Throws
/// std::logic_error on an empty buffer.
PerfDiffEstimate estimate_perf_diff_replay(const ReplayBuffer& buffer, const PolicyEvaluator& main,
                                           const PolicyEvaluator& aux, double gamma, int batch,
                                           Rng* rng);

/// Per-step values of one trajectory used by the dual identity.
struct StepValues {
  double reward = 0.0;
  double imitation = 0.0;  // -H^X estimate at this step (<= 0)
};

struct DualIdentity {
  double lhs = 0.0;  // J_TG(pi, alpha) + lambda (J_R(pi) - eta)
  double rhs = 0.0;  // (1 + lambda) J_TG(pi, alpha / (1 + lambda)) - lambda eta
  double residual() const { return std::abs(lhs - rhs); }
};

/// Both sides of the Lagrangian rewrite evaluated on empirical discounted
/// sums over the given trajectories.
DualIdentity dual_identity_check(const std::vector<std::vector<StepValues>>& trajectories,
                                 double alpha, double lambda, double eta, double gamma);

}  // namespace tgrl

#endif  // TGRL_DUAL_HPP
