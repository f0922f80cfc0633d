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

// Comparison algorithms. They all run on the Learner stack; what differs is
// the coefficient mechanism, collected here as free functions.

#ifndef TGRL_BASELINES_HPP
#define TGRL_BASELINES_HPP

#include "tgrl/learner.hpp"

#include <Eigen/Dense>

#include <memory>

namespace tgrl {

struct CosilState {
  double alpha = 1.0;
  double target = -1.0;  // D-bar, the desired discounted imitation return
  double lr = 0.05;
};

/// alpha <- max(0, alpha - lr * (j_e - target)).
CosilState cosil_update_alpha(CosilState state, double j_e);

/// KL(p || q) in nats for distributions given as columns of equal length.
double kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXd>& q);

/// exp(-beta * KL(teacher || aux)), in (0, 1].
double advisor_weight(double beta, const Eigen::Ref<const Eigen::VectorXd>& teacher_dist,
                      const Eigen::Ref<const Eigen::VectorXd>& aux_dist);

/// r + gamma * V(h') * (1 - done) - V(h).
inline double shaped_reward(double reward, double value, double next_value, bool done, double gamma) {
  return reward + (done ? 0.0 : gamma * next_value) - value;
}

/// Trains the configured algorithm for config.iterations and returns the
/// learner. The algorithm field is overridden by the named entry points.
std::unique_ptr<Learner> train(const RunConfig& config);
std::unique_ptr<Learner> train_il(RunConfig config);
std::unique_ptr<Learner> train_cosil(RunConfig config);
std::unique_ptr<Learner> train_advisor(RunConfig config);
std::unique_ptr<Learner> train_pbrs(RunConfig config);

}  // namespace tgrl

#endif  // TGRL_BASELINES_HPP
