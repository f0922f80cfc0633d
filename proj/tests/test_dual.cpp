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


#include "support/tabular.hpp"
#include "tgrl/dual.hpp"

#include <doctest.h>

#include <cmath>

using namespace tgrl;
using namespace tgrl::testing;

namespace {

DualState random_state(Rng& rng) {
  DualState s;
  s.alpha = 0.1 + 10.0 * uniform01(rng);
  s.lambda = uniform01(rng) < 0.1 ? 0.0 : 30.0 * uniform01(rng);
  s.mu = 1e-4 + 0.1 * uniform01(rng);
  s.normalizer_updates = uniform_int(rng, 50);
  s.diff_normalizer = s.normalizer_updates ? 2.0 * uniform01(rng) : 0.0;
  return s;
}

// Window of one: the current observation is the last num_states rows.
PolicyEvaluator tabular_evaluator(const Eigen::MatrixXd& q, const Eigen::MatrixXd& pi) {
  return [q, pi](const Eigen::MatrixXf& histories) {
    const auto S = q.rows();
    PolicyValues v{Eigen::MatrixXd(q.cols(), histories.cols()), Eigen::MatrixXd(q.cols(), histories.cols())};
    for (Eigen::Index i = 0; i < histories.cols(); ++i) {
      Eigen::Index s = 0;
      histories.col(i).tail(S).maxCoeff(&s);
      v.q.col(i) = q.row(s).transpose();
      v.probs.col(i) = pi.row(s).transpose();
    }
    return v;
  };
}

}  // namespace

TEST_CASE("default dual state") {
  const DualState s;
  CHECK(s.alpha == 3.0);
  CHECK(s.lambda == 9.0);
  CHECK(s.effective_coefficient() == doctest::Approx(0.3));
  const DualState f = DualState::fixed(3.0, 1.0);
  CHECK(f.frozen);
  CHECK(f.lambda == doctest::Approx(2.0));
  CHECK(f.effective_coefficient() == doctest::Approx(1.0));
  CHECK_THROWS_AS(DualState::fixed(3.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(DualState::fixed(3.0, 0.0), std::invalid_argument);
}

TEST_CASE("clipped imitation reward") {
  CHECK(clipped_log(1.0, 4.0) == 0.0);
  CHECK(clipped_log(0.5, 4.0) == doctest::Approx(std::log(0.5)));
  CHECK(clipped_log(1e-5, 4.0) == -4.0);
  auto env = make_tiger_door();
  auto teacher = shortest_path_teacher(*env, 0.02);
  const Transition tr = env->reset(0);
  for (int a = 0; a < 4; ++a) {
    const double r = imitation_reward(*teacher, tr.privileged_obs, a, 4.0);
    CHECK(r <= 0.0);
    CHECK(r >= -4.0);
  }
  // Non-greedy actions have probability 0.005 < exp(-4).
  const int g = teacher->greedy_action(tr.privileged_obs);
  CHECK(imitation_reward(*teacher, tr.privileged_obs, (g + 1) % 4, 4.0) == -4.0);
  CHECK(imitation_reward(*teacher, tr.privileged_obs, (g + 1) % 4, 10.0) == doctest::Approx(std::log(0.005)));
}

TEST_CASE("projected lambda step arithmetic") {
  DualState s;
  CHECK(apply_lambda_step(s, 1.0).lambda == doctest::Approx(9.0 - 3e-3));
  CHECK(apply_lambda_step(s, -1.0).lambda == doctest::Approx(9.0 + 3e-3));
  s.lambda = 1e-3;
  CHECK(apply_lambda_step(s, 1.0).lambda == 0.0);
}

TEST_CASE("normalised update follows the bias-corrected running mean") {
  DualState s;
  s = update_lambda(s, {0.5, PerfDiffMethod::ReplayAdvantage, 1});
  // First update: the normaliser equals |diff|, so the step is exactly mu.
  CHECK(s.diff_normalizer == doctest::Approx(0.5));
  CHECK(s.lambda == doctest::Approx(9.0 - 3e-3));
  s = update_lambda(s, {-2.0, PerfDiffMethod::ReplayAdvantage, 1});
  const double raw = 0.99 * 0.01 * 0.5 + 0.01 * 2.0;
  const double norm = raw / (1.0 - 0.99 * 0.99);
  CHECK(s.diff_normalizer == doctest::Approx(norm));
  CHECK(s.lambda == doctest::Approx(9.0 - 3e-3 + 3e-3 * 2.0 / norm));

  // Tiny differences are divided by the floor, not by their own magnitude.
  DualState tiny;
  tiny = update_lambda(tiny, {1e-6, PerfDiffMethod::ReplayAdvantage, 1});
  CHECK(tiny.lambda == doctest::Approx(9.0 - 3e-3 * 1e-6 / 1e-3));

  DualState frozen = DualState::fixed(3.0, 0.3);
  CHECK(update_lambda(frozen, {5.0, PerfDiffMethod::ReplayAdvantage, 1}).lambda == frozen.lambda);
  CHECK_THROWS_AS(update_lambda(s, {std::nan(""), PerfDiffMethod::ReplayAdvantage, 1}), std::domain_error);
}

TEST_CASE("lambda moves against the performance difference") {
  Rng rng(11);
  for (int k = 0; k < 10000; ++k) {
    const DualState s = random_state(rng);
    const double diff = 4.0 * uniform01(rng) - 2.0;
    const DualState n = update_lambda(s, {diff, PerfDiffMethod::ReplayAdvantage, 1});
    REQUIRE(n.lambda >= 0.0);
    if (diff > 0.0) REQUIRE(n.lambda <= s.lambda);
    if (diff < 0.0) REQUIRE(n.lambda >= s.lambda);
    REQUIRE(n.effective_coefficient() > 0.0);
    REQUIRE(n.effective_coefficient() <= n.alpha);
  }
}

TEST_CASE("softmax policies") {
  Eigen::MatrixXd q(3, 2);
  q << 1.0, 1e4, 2.0, 1e4, 0.5, -1e4;
  const Eigen::MatrixXd p = softmax_columns(q, 0.1);
  CHECK(p.colwise().sum().isApprox(Eigen::RowVector2d::Ones()));
  CHECK(p.allFinite());
  CHECK(p(1, 0) > p(0, 0));
  CHECK(p(0, 1) == doctest::Approx(0.5));
  const Eigen::MatrixXd hot = softmax_columns(q.col(0), 1.0);
  CHECK(hot(1, 0) / hot(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(greedy_action(Eigen::Vector3d(1.0, 3.0, 3.0)) == 1);
  CHECK_THROWS_AS(softmax_columns(q, 0.0), std::invalid_argument);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v[i] = uniform01(rng);
    const double t = 0.01 + uniform01(rng);
    CHECK(greedy_action(softmax_columns(v, t).col(0)) == greedy_action(v));
  }
}

TEST_CASE("performance difference is antisymmetric") {
  Rng rng(5);
  const int n = 50;
  auto random_values = [&] {
    PolicyValues v{Eigen::MatrixXd(4, n), Eigen::MatrixXd()};
    for (Eigen::Index i = 0; i < v.q.size(); ++i) v.q.data()[i] = uniform01(rng);
    v.probs = softmax_columns(v.q, 0.5);
    return v;
  };
  const PolicyValues a = random_values(), b = random_values();
  std::vector<int> actions, times;
  for (int i = 0; i < n; ++i) {
    actions.push_back(uniform_int(rng, 4));
    times.push_back(uniform_int(rng, 20));
  }
  const double ab = perf_diff_from_values(a, b, actions, times, 0.9, 7.0).value;
  const double ba = perf_diff_from_values(b, a, actions, times, 0.9, 7.0).value;
  CHECK(ab == doctest::Approx(-ba));
  CHECK(perf_diff_from_values(a, a, actions, times, 0.9, 7.0).value == 0.0);
  CHECK_THROWS_AS(perf_diff_from_values(a, b, std::vector<int>(3), times, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("dual identity holds on random trajectories") {
  Rng rng(13);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    std::vector<std::vector<StepValues>> trajs(1 + static_cast<std::size_t>(uniform_int(rng, 8)));
    for (auto& t : trajs) {
      t.resize(1 + static_cast<std::size_t>(uniform_int(rng, 40)));
      for (auto& s : t) s = {2.0 * uniform01(rng) - 1.0, -4.0 * uniform01(rng)};
    }
    const auto id = dual_identity_check(trajs, 0.1 + 5.0 * uniform01(rng), 20.0 * uniform01(rng),
                                        2.0 * uniform01(rng) - 1.0, 0.5 + 0.5 * uniform01(rng));
    worst = std::max(worst, id.residual());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("replay estimator matches exact policy evaluation on a tabular MDP") {
  Rng rng(21);
  const double gamma = 0.9;
  const TabularMdp m = random_mdp(5, 3, 0.15, rng);
  const Eigen::MatrixXd pi = random_policy(5, 3, rng);
  const Eigen::MatrixXd pi_r = random_policy(5, 3, rng);
  const double exact = exact_return(m, pi, gamma) - exact_return(m, pi_r, gamma);

  ReplayBuffer buf(200000, BufferMode::Joint, 1, 5, 3);
  for (int e = 0; buf.size() < 50000; ++e) {
    const bool main = e % 2 == 0;
    buf.push_trajectory(sample_episode(m, main ? pi : pi_r, main ? Collector::MainPolicy : Collector::AuxPolicy, rng));
  }
  const auto est = estimate_perf_diff_replay(buf, tabular_evaluator(exact_q(m, pi, gamma), pi),
                                             tabular_evaluator(exact_q(m, pi_r, gamma), pi_r), gamma, 0,
                                             nullptr);
  CHECK(est.samples == buf.size());
  CHECK(std::abs(est.value - exact) < 0.03);
}

TEST_CASE("exact policy evaluation agrees with Monte Carlo returns") {
  Rng rng(22);
  const double gamma = 0.9;
  const TabularMdp m = random_mdp(4, 2, 0.2, rng);
  const Eigen::MatrixXd pi = random_policy(4, 2, rng);
  double total = 0.0;
  const int episodes = 40000;
  for (int e = 0; e < episodes; ++e) {
    const Trajectory t = sample_episode(m, pi, Collector::MainPolicy, rng);
    double g = 1.0;
    for (const auto& s : t.steps) {
      total += g * s.transition.reward;
      g *= gamma;
    }
  }
  CHECK(std::abs(total / episodes - exact_return(m, pi, gamma)) < 0.03);
}
