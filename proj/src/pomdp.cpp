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

#include "tgrl/pomdp.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgrl {

void EnvSpec::validate() const {
  if (name.empty()) throw std::invalid_argument("EnvSpec.name: empty");
  if (num_actions < 2) throw std::invalid_argument("EnvSpec.num_actions: must be >= 2");
  if (student_obs_dim < 1) throw std::invalid_argument("EnvSpec.student_obs_dim: must be >= 1");
  if (privileged_obs_dim < student_obs_dim)
    throw std::invalid_argument("EnvSpec.privileged_obs_dim: smaller than student_obs_dim");
  if (max_episode_len < 1) throw std::invalid_argument("EnvSpec.max_episode_len: must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0))
    throw std::invalid_argument("EnvSpec.discount: must lie in (0, 1]");
}

HistoryWindow::HistoryWindow(int window_len, int obs_dim, int num_actions)
    : window_len_(window_len),
      obs_dim_(obs_dim),
      num_actions_(num_actions),
      current_(ObsVector::Zero(obs_dim)) {
  if (window_len < 1 || obs_dim < 1 || num_actions < 1)
    throw std::invalid_argument("HistoryWindow: sizes must be positive");
}

void HistoryWindow::reset(const ObsVector& first_obs) {
  if (first_obs.size() != obs_dim_)
    throw std::invalid_argument("HistoryWindow::reset: observation dimension mismatch");
  entries_.clear();
  current_ = first_obs;
}

void HistoryWindow::push(const ObsVector& next_obs, int action) {
  if (next_obs.size() != obs_dim_)
    throw std::invalid_argument("HistoryWindow::push: observation dimension mismatch");
  if (action < 0 || action >= num_actions_)
    throw std::invalid_argument("HistoryWindow::push: action out of range");
  entries_.push_back({current_, action});
  if (static_cast<int>(entries_.size()) > window_len_) entries_.pop_front();
  current_ = next_obs;
}

void HistoryWindow::encode(std::span<float> out) const {
  if (static_cast<int>(out.size()) != encoded_size())
    throw std::invalid_argument("HistoryWindow::encode: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0f);
  const int slot = obs_dim_ + num_actions_;
  const int pad = window_len_ - filled();
  for (int i = 0; i < filled(); ++i) {
    float* dst = out.data() + static_cast<std::ptrdiff_t>(pad + i) * slot;
    const Entry& e = entries_[static_cast<std::size_t>(i)];
    std::copy_n(e.obs.data(), obs_dim_, dst);
    dst[obs_dim_ + e.action] = 1.0f;
  }
  std::copy_n(current_.data(), obs_dim_,
              out.data() + static_cast<std::ptrdiff_t>(window_len_) * slot);
}

Eigen::VectorXf HistoryWindow::encode() const {
  Eigen::VectorXf v(encoded_size());
  encode(std::span<float>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

void encode_window_from_episode(std::span<const float> observations,
                                std::span<const int> actions, int t, int window_len,
                                int obs_dim, int num_actions, std::span<float> out) {
  const int slot = obs_dim + num_actions;
  std::fill(out.begin(), out.end(), 0.0f);
  const int first = std::max(0, t - window_len);
  const int pad = window_len - (t - first);
  for (int k = first; k < t; ++k) {
    float* dst = out.data() + static_cast<std::ptrdiff_t>(pad + k - first) * slot;
    std::copy_n(observations.data() + static_cast<std::ptrdiff_t>(k) * obs_dim, obs_dim, dst);
    dst[obs_dim + actions[static_cast<std::size_t>(k)]] = 1.0f;
  }
  std::copy_n(observations.data() + static_cast<std::ptrdiff_t>(t) * obs_dim, obs_dim,
              out.data() + static_cast<std::ptrdiff_t>(window_len) * slot);
}

const char* collector_name(Collector c) {
  switch (c) {
    case Collector::MainPolicy: return "main";
    case Collector::AuxPolicy: return "aux";
    case Collector::Teacher: return "teacher";
  }
  return "?";
}

void Trajectory::validate() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].transition.timestep != static_cast<int>(i) + 1)
      throw std::logic_error("Trajectory: timesteps are not consecutive");
    if (steps[i].transition.done && i + 1 != steps.size())
      throw std::logic_error("Trajectory: done before the last step");
  }
}

double Trajectory::undiscounted_return() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.transition.reward;
  return total;
}

Outcome Trajectory::outcome() const {
  return steps.empty() ? Outcome::Running : steps.back().transition.outcome;
}

}  // namespace tgrl
