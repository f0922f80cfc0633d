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

#include "tgrl/dual.hpp"

#include <cmath>
#include <stdexcept>

namespace tgrl {

DualState DualState::fixed(double alpha, double coefficient) {
  if (!(alpha > 0.0)) throw std::invalid_argument("DualState::fixed: alpha must be positive");
  if (!(coefficient > 0.0 && coefficient <= alpha))
    throw std::invalid_argument("DualState::fixed: coefficient must lie in (0, alpha]");
  DualState s;
  s.alpha = alpha;
  s.lambda = alpha / coefficient - 1.0;
  s.frozen = true;
  return s;
}

double imitation_reward(const TeacherPolicy& teacher, const ObsVector& privileged_obs, int action,
                        double c_clip) {
  return std::max(teacher_logprob(teacher, privileged_obs, action), -c_clip);
}

DualState apply_lambda_step(DualState state, double normalized_diff) {
  state.lambda = std::max(0.0, state.lambda - state.mu * normalized_diff);
  return state;
}

DualState update_lambda(const DualState& state, const PerfDiffEstimate& diff) {
  if (!std::isfinite(diff.value)) throw std::domain_error("update_lambda: non-finite difference");
  if (state.frozen) return state;
  DualState next = state;
  ++next.normalizer_updates;
  // The stored value is bias corrected; undo that before folding in.
  const double d = next.normalizer_decay;
  const double prev_raw = state.diff_normalizer * (1.0 - std::pow(d, static_cast<double>(state.normalizer_updates)));
  const double raw = d * prev_raw + (1.0 - d) * std::abs(diff.value);
  next.diff_normalizer = raw / (1.0 - std::pow(d, static_cast<double>(next.normalizer_updates)));
  const double normalized = diff.value / std::max(next.diff_normalizer, next.eps_norm);
  return apply_lambda_step(next, normalized);
}

Eigen::MatrixXd softmax_columns(const Eigen::Ref<const Eigen::MatrixXd>& q, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax_columns: temperature must be positive");
  Eigen::MatrixXd z = q / temperature;
  z.rowwise() -= z.colwise().maxCoeff();
  z = z.array().exp();
  z.array().rowwise() /= z.colwise().sum().array();
  return z;
}

int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) {
  Eigen::Index best = 0;
  q.maxCoeff(&best);  // first maximal index
  return static_cast<int>(best);
}

PerfDiffEstimate perf_diff_from_values(const PolicyValues& main, const PolicyValues& aux,
                                       std::span<const int> actions,
                                       std::span<const int> timesteps, double gamma, double scale) {
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (main.q.cols() != n || aux.q.cols() != n || main.probs.cols() != n || aux.probs.cols() != n ||
      static_cast<Eigen::Index>(timesteps.size()) != n)
    throw std::invalid_argument("perf_diff_from_values: sample counts disagree");
  if (n == 0) throw std::logic_error("perf_diff_from_values: no samples");
  const Eigen::RowVectorXd v_main = (main.q.cwiseProduct(main.probs)).colwise().sum();
  const Eigen::RowVectorXd v_aux = (aux.q.cwiseProduct(aux.probs)).colwise().sum();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double adv_main = main.q(a, i) - v_main[i];
    const double adv_aux = aux.q(a, i) - v_aux[i];
    sum += std::pow(gamma, timesteps[static_cast<std::size_t>(i)]) * (adv_aux - adv_main);
  }
  PerfDiffEstimate est;
  est.value = scale * sum / static_cast<double>(n);
  est.method = PerfDiffMethod::ReplayAdvantage;
  est.samples = static_cast<int>(n);
  return est;
}

PerfDiffEstimate estimate_perf_diff_replay(const ReplayBuffer& buffer, const PolicyEvaluator& main,
                                           const PolicyEvaluator& aux, double gamma, int batch,
                                           Rng* rng) {
  if (buffer.size_for(Collector::MainPolicy) == 0)
    throw std::logic_error("estimate_perf_diff_replay: empty buffer");
  ReplayBatch b;
  if (batch <= 0) {
    b = buffer.all(Collector::MainPolicy);
  } else {
    if (!rng) throw std::invalid_argument("estimate_perf_diff_replay: sampling needs a generator");
    b = buffer.sample_batch(batch, *rng, Collector::MainPolicy);
  }
  return perf_diff_from_values(main(b.histories), aux(b.histories), b.actions, b.timesteps, gamma,
                               buffer.records_per_episode(Collector::MainPolicy));
}

DualIdentity dual_identity_check(const std::vector<std::vector<StepValues>>& trajectories,
                                 double alpha, double lambda, double eta, double gamma) {
  if (trajectories.empty()) throw std::invalid_argument("dual_identity_check: no trajectories");
  const double coef = alpha / (1.0 + lambda);
  double j_r = 0.0, j_tg_alpha = 0.0, j_tg_coef = 0.0;
  for (const auto& traj : trajectories) {
    double discount = 1.0;
    for (const StepValues& s : traj) {
      j_r += discount * s.reward;
      j_tg_alpha += discount * (s.reward + alpha * s.imitation);
      j_tg_coef += discount * (s.reward + coef * s.imitation);
      discount *= gamma;
    }
  }
  const auto n = static_cast<double>(trajectories.size());
  j_r /= n;
  j_tg_alpha /= n;
  j_tg_coef /= n;
  return {j_tg_alpha + lambda * (j_r - eta), (1.0 + lambda) * j_tg_coef - lambda * eta};
}

}  // namespace tgrl
