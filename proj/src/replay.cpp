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

#include "tgrl/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgrl {

ReplayBuffer::ReplayBuffer(int capacity, BufferMode mode, int window_len, int obs_dim,
                           int num_actions)
    : capacity_(capacity),
      mode_(mode),
      window_len_(window_len),
      obs_dim_(obs_dim),
      num_actions_(num_actions) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  if (window_len < 1 || obs_dim < 1 || num_actions < 1)
    throw std::invalid_argument("ReplayBuffer: sizes must be positive");
}

int ReplayBuffer::encoded_size() const {
  return HistoryWindow::encoded_size(window_len_, obs_dim_, num_actions_);
}

int ReplayBuffer::partition_of(Collector c) const {
  if (mode_ == BufferMode::Joint) return 0;
  return c == Collector::AuxPolicy ? 1 : 0;
}

int ReplayBuffer::size_for(Collector policy) const {
  return partitions_[static_cast<std::size_t>(partition_of(policy))].live;
}

const std::deque<ReplayBuffer::StoredEpisode>& ReplayBuffer::episodes(Collector policy) const {
  return partitions_[static_cast<std::size_t>(partition_of(policy))].episodes;
}

void ReplayBuffer::push_trajectory(const Trajectory& traj) {
  const int steps = static_cast<int>(traj.steps.size());
  if (steps == 0) return;
  traj.validate();
  if (static_cast<int>(traj.actions.size()) != steps ||
      static_cast<int>(traj.observations.size()) != (steps + 1) * obs_dim_)
    throw std::invalid_argument("ReplayBuffer::push_trajectory: observation/action arrays do not match steps");
  StoredEpisode ep;
  ep.observations = traj.observations;
  ep.actions = traj.actions;
  ep.rewards.reserve(static_cast<std::size_t>(steps));
  ep.imitation_rewards.reserve(static_cast<std::size_t>(steps));
  const bool with_teacher = traj.steps.front().teacher_probs.size() == num_actions_;
  for (const auto& s : traj.steps) {
    ep.rewards.push_back(static_cast<float>(s.transition.reward));
    ep.imitation_rewards.push_back(static_cast<float>(s.imitation_reward));
    if (with_teacher)
      for (int a = 0; a < num_actions_; ++a) ep.teacher_probs.push_back(static_cast<float>(s.teacher_probs[a]));
  }
  ep.terminal = traj.steps.back().transition.done;
  ep.collector = traj.collector;
  ep.sequence = next_sequence_++;
  Partition& p = partitions_[static_cast<std::size_t>(partition_of(traj.collector))];
  p.episodes.push_back(std::move(ep));
  p.live += steps;
  p.dirty = true;
  size_ += steps;
  while (size_ > capacity_) evict_one();
}

void ReplayBuffer::evict_one() {
  Partition* oldest = nullptr;
  for (auto& p : partitions_) {
    if (p.episodes.empty()) continue;
    if (!oldest || p.episodes.front().sequence < oldest->episodes.front().sequence) oldest = &p;
  }
  StoredEpisode& ep = oldest->episodes.front();
  ++ep.first_live;
  --oldest->live;
  --size_;
  oldest->dirty = true;
  if (ep.live() == 0) oldest->episodes.pop_front();
}

void ReplayBuffer::refresh(const Partition& p) const {
  if (!p.dirty) return;
  p.cumulative.resize(p.episodes.size());
  int running = 0;
  for (std::size_t i = 0; i < p.episodes.size(); ++i) {
    running += p.episodes[i].live();
    p.cumulative[i] = running;
  }
  p.dirty = false;
}

ReplayBatch ReplayBuffer::allocate(int n) const {
  ReplayBatch b;
  const int in = encoded_size();
  b.histories.resize(in, n);
  b.next_histories.resize(in, n);
  b.actions.resize(static_cast<std::size_t>(n));
  b.rewards.resize(n);
  b.imitation_rewards.resize(n);
  b.done.resize(n);
  b.timesteps.resize(static_cast<std::size_t>(n));
  b.collectors.resize(static_cast<std::size_t>(n));
  b.teacher_probs = Eigen::MatrixXf::Zero(num_actions_, n);
  return b;
}

void ReplayBuffer::fill(ReplayBatch& b, int col, const StoredEpisode& ep, int t) const {
  const auto rows = static_cast<std::size_t>(b.histories.rows());
  std::span<const float> obs(ep.observations);
  std::span<const int> acts(ep.actions);
  encode_window_from_episode(obs, acts, t, window_len_, obs_dim_, num_actions_,
                             std::span<float>(b.histories.col(col).data(), rows));
  encode_window_from_episode(obs, acts, t + 1, window_len_, obs_dim_, num_actions_,
                             std::span<float>(b.next_histories.col(col).data(), rows));
  const auto ti = static_cast<std::size_t>(t);
  b.actions[static_cast<std::size_t>(col)] = ep.actions[ti];
  b.rewards[col] = ep.rewards[ti];
  b.imitation_rewards[col] = ep.imitation_rewards[ti];
  b.done[col] = (ep.terminal && t + 1 == ep.length()) ? 1.0 : 0.0;
  b.timesteps[static_cast<std::size_t>(col)] = t;
  b.collectors[static_cast<std::size_t>(col)] = ep.collector;
  if (!ep.teacher_probs.empty())
    for (int a = 0; a < num_actions_; ++a)
      b.teacher_probs(a, col) = ep.teacher_probs[ti * static_cast<std::size_t>(num_actions_) + static_cast<std::size_t>(a)];
}

ReplayBatch ReplayBuffer::sample_batch(int n, Rng& rng, Collector policy) const {
  if (n < 1) throw std::invalid_argument("ReplayBuffer::sample_batch: n must be positive");
  const Partition& p = partitions_[static_cast<std::size_t>(partition_of(policy))];
  if (p.live == 0) throw std::logic_error("ReplayBuffer::sample_batch: no records to sample");
  refresh(p);
  ReplayBatch b = allocate(n);
  for (int i = 0; i < n; ++i) {
    const int k = uniform_int(rng, p.live);
    const auto it = std::upper_bound(p.cumulative.begin(), p.cumulative.end(), k);
    const auto e = static_cast<std::size_t>(it - p.cumulative.begin());
    const int before = e == 0 ? 0 : p.cumulative[e - 1];
    const StoredEpisode& ep = p.episodes[e];
    fill(b, i, ep, ep.first_live + (k - before));
  }
  return b;
}

ReplayBatch ReplayBuffer::all(Collector policy) const {
  const Partition& p = partitions_[static_cast<std::size_t>(partition_of(policy))];
  ReplayBatch b = allocate(p.live);
  int col = 0;
  for (const auto& ep : p.episodes)
    for (int t = ep.first_live; t < ep.length(); ++t) fill(b, col++, ep, t);
  return b;
}

std::vector<ReplayRecord> ReplayBuffer::to_records(const ReplayBatch& b) const {
  std::vector<ReplayRecord> out(static_cast<std::size_t>(b.size()));
  for (int i = 0; i < b.size(); ++i) {
    auto& r = out[static_cast<std::size_t>(i)];
    r.history = b.histories.col(i);
    r.next_history = b.next_histories.col(i);
    r.action = b.actions[static_cast<std::size_t>(i)];
    r.reward = b.rewards[i];
    r.imitation_reward = b.imitation_rewards[i];
    r.done = b.done[i] > 0.5;
    r.timestep = b.timesteps[static_cast<std::size_t>(i)];
    r.collector = b.collectors[static_cast<std::size_t>(i)];
    r.teacher_probs = b.teacher_probs.col(i);
  }
  return out;
}

std::vector<ReplayRecord> ReplayBuffer::sample_records(int n, Rng& rng, Collector policy) const {
  return to_records(sample_batch(n, rng, policy));
}

std::vector<ReplayRecord> ReplayBuffer::sample_records(int n, std::uint64_t seed,
                                                       Collector policy) const {
  Rng rng(seed);
  return sample_records(n, rng, policy);
}

double ReplayBuffer::records_per_episode(Collector policy) const {
  const Partition& p = partitions_[static_cast<std::size_t>(partition_of(policy))];
  if (p.live == 0) return 0.0;
  int starts = 0;
  for (const auto& ep : p.episodes)
    if (ep.first_live == 0) ++starts;
  if (starts == 0) starts = static_cast<int>(p.episodes.size());
  return static_cast<double>(p.live) / starts;
}

}  // namespace tgrl
