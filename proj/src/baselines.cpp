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

#include "tgrl/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace tgrl {

CosilState cosil_update_alpha(CosilState state, double j_e) {
  if (!std::isfinite(j_e)) throw std::domain_error("cosil_update_alpha: non-finite imitation return");
  state.alpha = std::max(0.0, state.alpha - state.lr * (j_e - state.target));
  return state;
}

double kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], 1e-300)));
  }
  return std::max(kl, 0.0);
}

double advisor_weight(double beta, const Eigen::Ref<const Eigen::VectorXd>& teacher_dist,
                      const Eigen::Ref<const Eigen::VectorXd>& aux_dist) {
  if (!(beta > 0.0)) throw std::invalid_argument("advisor_weight: beta must be positive");
  return std::exp(-beta * kl_divergence(teacher_dist, aux_dist));
}

std::unique_ptr<Learner> train(const RunConfig& config) {
  auto learner = std::make_unique<Learner>(config);
  for (int i = 0; i < config.iterations; ++i) learner->iterate();
  return learner;
}

std::unique_ptr<Learner> train_il(RunConfig config) {
  config.algorithm = Algorithm::Il;
  return train(config);
}

std::unique_ptr<Learner> train_cosil(RunConfig config) {
  config.algorithm = Algorithm::Cosil;
  return train(config);
}

std::unique_ptr<Learner> train_advisor(RunConfig config) {
  config.algorithm = Algorithm::Advisor;
  return train(config);
}

std::unique_ptr<Learner> train_pbrs(RunConfig config) {
  config.algorithm = Algorithm::Pbrs;
  return train(config);
}

}  // namespace tgrl
