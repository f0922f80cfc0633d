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

#ifndef TGRL_POMDP_HPP
#define TGRL_POMDP_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tgrl {

using ObsVector = Eigen::VectorXf;

struct EnvSpec {
  std::string name;
  int num_actions = 0;
  int student_obs_dim = 0;
  int privileged_obs_dim = 0;
  int max_episode_len = 0;  // number of timesteps t = 0 .. max_episode_len-1
  double discount = 0.9;

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

enum class Outcome { Running, Success, Failure, Timeout };

/// What the agent sees after reset or after one step.
///
/// `timestep` is the index of the observation: 0 after reset, k after k
/// steps. `done` is set on reaching a terminal cell or when
/// timestep + 1 == max_episode_len.
struct Transition {
  ObsVector student_obs;
  ObsVector privileged_obs;
  double reward = 0.0;
  bool done = false;
  int timestep = 0;
  Outcome outcome = Outcome::Running;
};

/// Base of every POMDP. Instances own their state and random stream and are
/// not shared between threads.
///
/// Every implementation lays out the privileged observation as the student
/// observation followed by the privileged-only channels, so the projection
/// from privileged to student observations is a prefix slice.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  /// Identical seeds give bit-identical initial states and observations.
  virtual Transition reset(std::uint64_t seed) = 0;

  /// Throws std::logic_error when the episode already ended and
  /// std::out_of_range for an invalid action.
  virtual Transition step(int action) = 0;

  virtual bool terminal() const = 0;
  virtual int timestep() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  /// One character per cell; see gridworld.hpp for the character set.
  virtual std::string ascii_map() const = 0;
};

/// Student-side projection of a privileged observation.
inline ObsVector project_to_student(const ObsVector& privileged, const EnvSpec& spec) {
  return privileged.head(spec.student_obs_dim);
}

/// Fixed-length window over the last K (observation, action) pairs plus the
/// current observation.
///
/// Encoding layout: K slots, oldest first, each slot is
/// [obs (obs_dim) | one-hot action (num_actions)]; then the current
/// observation. Slots not yet filled are zero and always the oldest ones.
class HistoryWindow {
 public:
  HistoryWindow(int window_len, int obs_dim, int num_actions);

  /// Starts a new episode with the first observation.
  void reset(const ObsVector& first_obs);

  /// Records `action` taken from the current observation, then makes
  /// `next_obs` current. Evicts the oldest entry once K entries are held.
  void push(const ObsVector& next_obs, int action);

  int window_len() const { return window_len_; }
  int filled() const { return static_cast<int>(entries_.size()); }
  int encoded_size() const { return encoded_size(window_len_, obs_dim_, num_actions_); }
  const ObsVector& current() const { return current_; }

  void encode(std::span<float> out) const;
  Eigen::VectorXf encode() const;

  static int encoded_size(int window_len, int obs_dim, int num_actions) {
    return window_len * (obs_dim + num_actions) + obs_dim;
  }

 private:
  struct Entry {
    ObsVector obs;
    int action;
  };
  int window_len_;
  int obs_dim_;
  int num_actions_;
  std::deque<Entry> entries_;
  ObsVector current_;
};

/// Encodes the window ending at observation index `t` of an episode stored
/// as contiguous arrays: `observations` holds obs 0..T row after row and
/// `actions[k]` is the action taken at observation k. Produces exactly what
/// a HistoryWindow fed the same episode would.
void encode_window_from_episode(std::span<const float> observations,
                                std::span<const int> actions, int t, int window_len,
                                int obs_dim, int num_actions, std::span<float> out);

enum class Collector : std::uint8_t { MainPolicy = 0, AuxPolicy = 1, Teacher = 2 };

const char* collector_name(Collector c);

/// One step of a trajectory: the history the action was chosen from, the
/// action, and the transition it produced.
struct TrajectoryStep {
  Eigen::VectorXf history;
  int action = 0;
  Transition transition;
  double imitation_reward = 0.0;
  Eigen::VectorXd teacher_probs;  // teacher distribution at the decision point
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  /// Student observations 0..T, concatenated. Lets the replay buffer rebuild
  /// windows without storing one encoding per record.
  std::vector<float> observations;
  std::vector<int> actions;
  Collector collector = Collector::MainPolicy;
  std::uint64_t seed = 0;

  /// Consecutive timesteps from the decision at t = 0; only the last step may
  /// be done. Throws std::logic_error otherwise.
  void validate() const;
  double undiscounted_return() const;
  Outcome outcome() const;
};

}  // namespace tgrl

#endif  // TGRL_POMDP_HPP
