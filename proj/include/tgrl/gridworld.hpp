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

// Gridworld POMDPs with a privileged observation channel.
//
// ASCII map character set (GridMap::to_ascii / ascii_map()):
//   '#' wall            '.' floor           'S' start
//   'A' goal candidate A  'B' goal candidate B  'P' button
//   'L' lava            'O' object slot     'G' goal
//   'R' room floor      '+' lit floor       '-' dark floor
//   '@' agent (overlay in Environment::ascii_map only)
//
// Rewards are +1 on success, -1 on failure, 0 otherwise.

#ifndef TGRL_GRIDWORLD_HPP
#define TGRL_GRIDWORLD_HPP

#include "tgrl/pomdp.hpp"
#include "tgrl/random.hpp"

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tgrl {

enum class Cell : char {
  Wall = '#',
  Floor = '.',
  Start = 'S',
  GoalCandidateA = 'A',
  GoalCandidateB = 'B',
  Button = 'P',
  Lava = 'L',
  ObjectSlot = 'O',
  Goal = 'G',
  Room = 'R',
  Lit = '+',
  Dark = '-',
};

struct GridPos {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
  friend GridPos operator+(GridPos a, GridPos b) { return {a.row + b.row, a.col + b.col}; }
};

/// Moves: 0 up, 1 right, 2 down, 3 left.
inline constexpr std::array<GridPos, 4> kMoves{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, Cell fill = Cell::Floor);

  /// Rows of equal length using the documented character set.
  static GridMap parse(const std::vector<std::string>& rows);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(GridPos p) const {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }
  Cell at(GridPos p) const { return cells_[index(p)]; }
  void set(GridPos p, Cell c) { cells_[index(p)] = c; }
  int index(GridPos p) const { return p.row * width_ + p.col; }
  GridPos position(int index) const { return {index / width_, index % width_}; }

  std::vector<GridPos> find(Cell c) const;
  std::string to_ascii() const;

  /// Cells reachable from `from` over non-wall, non-lava cells.
  std::vector<bool> flood_fill(GridPos from) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
};

/// Deterministic shortest-path problem reconstructed from a privileged
/// observation. successor[node * num_actions + a] is the next node, or -1 when
/// the move ends the episode in failure.
struct NavigationProblem {
  int num_nodes = 0;
  int num_actions = 0;
  int current = 0;
  std::vector<int> successor;
  std::vector<bool> goal;
};

/// Environment whose privileged observation is rich enough for a
/// shortest-path teacher.
class NavigableEnvironment : public Environment {
 public:
  /// Pure function of the observation; never reads the live episode state.
  virtual NavigationProblem navigation(const ObsVector& privileged_obs) const = 0;
  virtual const GridMap& grid() const = 0;
  virtual GridPos agent() const = 0;
};

/// Common machinery: map, agent position, step counter, seeded stream.
class GridEnvironmentBase : public NavigableEnvironment {
 public:
  const EnvSpec& spec() const override { return spec_; }
  bool terminal() const override { return done_; }
  int timestep() const override { return t_; }
  const GridMap& grid() const override { return map_; }
  GridPos agent() const override { return agent_; }
  std::string ascii_map() const override;

 protected:
  /// Shared step bookkeeping: validates, advances time, applies the timeout.
  Transition finish_step(double reward, Outcome outcome);
  void check_step(int action) const;
  Transition begin_episode();
  virtual void fill_observations(Transition& tr) = 0;

  EnvSpec spec_;
  GridMap map_;
  GridPos agent_;
  int t_ = 0;
  bool done_ = false;
  Rng rng_{0};
};

/// 7x7 maze: corridor from Start up to a split with two goal candidates; a
/// button one cell off the corridor reveals which candidate is the goal.
///
/// Student obs: [position one-hot over open cells | identity channel over
/// open cells (+1 goal, -1 failure, zero until the button is touched)].
/// Privileged extra: identity channel, always populated.
class TigerDoor final : public GridEnvironmentBase {
 public:
  TigerDoor();
  Transition reset(std::uint64_t seed) override;
  Transition step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<TigerDoor>(*this); }
  NavigationProblem navigation(const ObsVector& privileged_obs) const override;

  bool revealed() const { return revealed_; }
  GridPos goal_cell() const { return goal_; }
  GridPos failure_cell() const { return failure_; }
  const std::vector<GridPos>& open_cells() const { return open_; }

 private:
  void fill_observations(Transition& tr) override;
  std::vector<GridPos> open_;
  std::vector<int> open_index_;  // map index -> open-cell index or -1
  GridPos goal_;
  GridPos failure_;
  bool revealed_ = false;
};

/// 15x15 crossing map: lava rivers with one gap each, start top-left facing
/// right, goal bottom-right. Actions move one cell and turn the agent to the
/// move direction.
///
/// Student obs: egocentric 5x5 patch in front of the agent (agent at bottom
/// centre, rotated into the agent frame) with channels [wall, lava, goal],
/// then an orientation one-hot.
/// Privileged extra: full-map [lava, goal, agent] channels.
class LavaCrossing final : public GridEnvironmentBase {
 public:
  static constexpr int kSize = 15;
  static constexpr int kView = 5;

  explicit LavaCrossing(int num_rivers = 1);
  Transition reset(std::uint64_t seed) override;
  Transition step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<LavaCrossing>(*this); }
  NavigationProblem navigation(const ObsVector& privileged_obs) const override;

  int orientation() const { return orientation_; }
  int num_rivers() const { return num_rivers_; }
  GridPos goal_cell() const { return {kSize - 2, kSize - 2}; }

 private:
  void fill_observations(Transition& tr) override;
  void generate();
  int num_rivers_;
  int orientation_ = 1;
};

/// 11x11 corridor with two terminal objects at its far end and a one-cell
/// side room near the end showing the cue object. Touching the object that
/// matches the cue succeeds; the other fails.
///
/// Student obs: [position one-hot over open cells | cue one-hot (2), zero
/// outside the room]. Privileged extra: cue one-hot, always populated.
class Memory final : public GridEnvironmentBase {
 public:
  Memory();
  Transition reset(std::uint64_t seed) override;
  Transition step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Memory>(*this); }
  NavigationProblem navigation(const ObsVector& privileged_obs) const override;

  int cue() const { return cue_; }
  bool in_room() const { return map_.at(agent_) == Cell::Room; }
  /// Object slots in order; slot k holds object type k.
  const std::array<GridPos, 2>& slots() const { return slots_; }
  const std::vector<GridPos>& open_cells() const { return open_; }

 private:
  void fill_observations(Transition& tr) override;
  std::vector<GridPos> open_;
  std::vector<int> open_index_;
  std::array<GridPos, 2> slots_{};
  int cue_ = 0;
};

/// 11x11 room; columns left of kLitFrom are dark, the rest lit. In the dark
/// the student's reported position is the true one plus an offset drawn
/// uniformly from the 3x3 neighbourhood; in the light it is exact. Fixed goal
/// in the dark half, random start in the dark half.
///
/// Student obs: [reported column one-hot (13, offset by one) | reported row
/// one-hot (13) | lit flag]. Privileged extra: exact column and row one-hots.
class LightDark final : public GridEnvironmentBase {
 public:
  static constexpr int kSize = 11;
  static constexpr int kLitFrom = 6;

  LightDark();
  Transition reset(std::uint64_t seed) override;
  Transition step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<LightDark>(*this); }
  NavigationProblem navigation(const ObsVector& privileged_obs) const override;

  GridPos goal_cell() const { return goal_; }
  GridPos reported() const { return reported_; }
  bool lit(GridPos p) const { return p.col >= kLitFrom; }

 private:
  void fill_observations(Transition& tr) override;
  GridPos goal_{5, 1};
  GridPos reported_;
};

std::unique_ptr<NavigableEnvironment> make_tiger_door();
std::unique_ptr<NavigableEnvironment> make_lava_crossing(int num_rivers = 1);
std::unique_ptr<NavigableEnvironment> make_memory();
std::unique_ptr<NavigableEnvironment> make_light_dark();

/// Known names: tiger_door, lava_crossing, memory, light_dark.
/// Throws std::invalid_argument otherwise.
std::unique_ptr<NavigableEnvironment> make_env(std::string_view name);

const std::vector<std::string>& env_names();

}  // namespace tgrl

#endif  // TGRL_GRIDWORLD_HPP
