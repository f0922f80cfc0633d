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

#ifndef TGRL_REPLAY_HPP
#define TGRL_REPLAY_HPP

#include "tgrl/pomdp.hpp"
#include "tgrl/random.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

namespace tgrl {

struct ReplayRecord {
  Eigen::VectorXf history;
  int action = 0;
  double reward = 0.0;
  double imitation_reward = 0.0;  // clipped teacher log-probability, in [-C_clip, 0]
  Eigen::VectorXf next_history;
  bool done = false;
  int timestep = 0;
  Collector collector = Collector::MainPolicy;
  Eigen::VectorXf teacher_probs;  // teacher distribution at `history`
};

/// A sampled batch laid out for the networks: one sample per column.
struct ReplayBatch {
  Eigen::MatrixXf histories;
  Eigen::MatrixXf next_histories;
  std::vector<int> actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd imitation_rewards;
  Eigen::VectorXd done;  // 1 for terminal records
  std::vector<int> timesteps;
  std::vector<Collector> collectors;
  Eigen::MatrixXf teacher_probs;  // num_actions x n

  int size() const { return static_cast<int>(actions.size()); }
};

enum class BufferMode { Joint, Separate };

/// Episode-granular FIFO store. Records are (episode, t) pairs; windows are
/// rebuilt from the stored observations when sampled, so each record carries
/// its own timestep and remains valid under any eviction pattern.
///
/// In Separate mode records are partitioned by collector and each policy
/// samples only its own partition; capacity and eviction stay global.
class ReplayBuffer {
 public:
  struct StoredEpisode {
    std::vector<float> observations;  // (T + 1) x obs_dim
    std::vector<int> actions;
    std::vector<float> rewards;
    std::vector<float> imitation_rewards;
    std::vector<float> teacher_probs;  // T x num_actions, may be empty
    bool terminal = true;              // last record ends the episode
    Collector collector = Collector::MainPolicy;
    std::uint64_t sequence = 0;
    int first_live = 0;  // records before this index were evicted

    int length() const { return static_cast<int>(actions.size()); }
    int live() const { return length() - first_live; }
  };

  ReplayBuffer(int capacity, BufferMode mode, int window_len, int obs_dim, int num_actions);

  /// Appends every transition of the trajectory; evicts the oldest records
  /// once size() would exceed capacity().
  void push_trajectory(const Trajectory& traj);

  int capacity() const { return capacity_; }
  BufferMode mode() const { return mode_; }
  int size() const { return size_; }
  /// Records visible to `policy` under the current mode.
  int size_for(Collector policy) const;
  bool empty() const { return size_ == 0; }
  int window_len() const { return window_len_; }
  int encoded_size() const;

  /// Uniform with replacement over the records visible to `policy`.
  /// Deterministic for a given generator state. Throws std::logic_error when
  /// that set is empty.
  ReplayBatch sample_batch(int n, Rng& rng, Collector policy = Collector::MainPolicy) const;
  std::vector<ReplayRecord> sample_records(int n, Rng& rng,
                                           Collector policy = Collector::MainPolicy) const;
  /// Seeded convenience overload.
  std::vector<ReplayRecord> sample_records(int n, std::uint64_t seed,
                                           Collector policy = Collector::MainPolicy) const;

  /// Every live record visible to `policy`, oldest first.
  ReplayBatch all(Collector policy = Collector::MainPolicy) const;

  /// Live records per complete episode start visible to `policy`: the factor
  /// turning a per-record mean into a per-episode sum.
  double records_per_episode(Collector policy = Collector::MainPolicy) const;

  /// Episodes of one partition, oldest first.
  const std::deque<StoredEpisode>& episodes(Collector policy = Collector::MainPolicy) const;

 private:
  struct Partition {
    std::deque<StoredEpisode> episodes;
    int live = 0;
    mutable std::vector<int> cumulative;  // prefix sums of live counts
    mutable bool dirty = true;
  };

  int partition_of(Collector c) const;
  void evict_one();
  void refresh(const Partition& p) const;
  void fill(ReplayBatch& batch, int column, const StoredEpisode& ep, int t) const;
  ReplayBatch allocate(int n) const;
  std::vector<ReplayRecord> to_records(const ReplayBatch& batch) const;

  int capacity_;
  BufferMode mode_;
  int window_len_;
  int obs_dim_;
  int num_actions_;
  int size_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::array<Partition, 2> partitions_;
};

}  // namespace tgrl

#endif  // TGRL_REPLAY_HPP
