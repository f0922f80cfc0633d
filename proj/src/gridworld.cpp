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

#include "tgrl/gridworld.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace tgrl {

namespace {


int argmax_index(const Eigen::Ref<const ObsVector>& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

// Open (non-wall) cells in row-major order plus the reverse lookup.
void index_open_cells(const GridMap& map, std::vector<GridPos>& open,
                      std::vector<int>& open_index) {
  open.clear();
  open_index.assign(static_cast<std::size_t>(map.width() * map.height()), -1);
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (map.at({r, c}) == Cell::Wall) continue;
      open_index[static_cast<std::size_t>(map.index({r, c}))] = static_cast<int>(open.size());
      open.push_back({r, c});
    }
  }
}

// Shared successor table over open cells for 4-way moves; walls block.
NavigationProblem open_cell_navigation(const GridMap& map, const std::vector<GridPos>& open,
                                       const std::vector<int>& open_index) {
  NavigationProblem nav;
  nav.num_nodes = static_cast<int>(open.size());
  nav.num_actions = 4;
  nav.successor.resize(open.size() * 4);
  nav.goal.assign(open.size(), false);
  for (std::size_t n = 0; n < open.size(); ++n) {
    for (int a = 0; a < 4; ++a) {
      GridPos next = open[n] + kMoves[static_cast<std::size_t>(a)];
      int target = static_cast<int>(n);
      if (map.in_bounds(next) && map.at(next) != Cell::Wall)
        target = open_index[static_cast<std::size_t>(map.index(next))];
      nav.successor[n * 4 + static_cast<std::size_t>(a)] = target;
    }
  }
  return nav;
}

void mark_fatal(NavigationProblem& nav, int node) {
  for (int& s : nav.successor)
    if (s == node) s = -1;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
    std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(uniform_int(rng, i + 1))]);
}

}  // namespace

// ---------------------------------------------------------------- GridMap

GridMap::GridMap(int width, int height, Cell fill)
    : width_(width), height_(height), cells_(static_cast<std::size_t>(width * height), fill) {
  if (width < 1 || height < 1) throw std::invalid_argument("GridMap: non-positive size");
}

GridMap GridMap::parse(const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("GridMap::parse: no rows");
  GridMap map(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int r = 0; r < map.height_; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != map.width_)
      throw std::invalid_argument("GridMap::parse: ragged rows");
    for (int c = 0; c < map.width_; ++c) {
      const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      switch (ch) {
        case '#': case '.': case 'S': case 'A': case 'B': case 'P':
        case 'L': case 'O': case 'G': case 'R': case '+': case '-':
          map.set({r, c}, static_cast<Cell>(ch));
          break;
        default:
          throw std::invalid_argument(std::string("GridMap::parse: unknown cell '") + ch + "'");
      }
    }
  }
  return map;
}

std::vector<GridPos> GridMap::find(Cell c) const {
  std::vector<GridPos> out;
  for (int i = 0; i < width_ * height_; ++i)
    if (cells_[static_cast<std::size_t>(i)] == c) out.push_back(position(i));
  return out;
}

std::string GridMap::to_ascii() const {
  std::string s;
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) s.push_back(static_cast<char>(at({r, c})));
    s.push_back('\n');
  }
  return s;
}

std::vector<bool> GridMap::flood_fill(GridPos from) const {
  std::vector<bool> seen(cells_.size(), false);
  if (!in_bounds(from)) return seen;
  std::queue<GridPos> frontier;
  frontier.push(from);
  seen[static_cast<std::size_t>(index(from))] = true;
  while (!frontier.empty()) {
    GridPos p = frontier.front();
    frontier.pop();
    for (GridPos m : kMoves) {
      GridPos q = p + m;
      if (!in_bounds(q)) continue;
      const Cell cell = at(q);
      if (cell == Cell::Wall || cell == Cell::Lava) continue;
      auto s = seen[static_cast<std::size_t>(index(q))];
      if (s) continue;
      s = true;
      frontier.push(q);
    }
  }
  return seen;
}

// ---------------------------------------------------------------- base

std::string GridEnvironmentBase::ascii_map() const {
  std::string s = map_.to_ascii();
  s[static_cast<std::size_t>(agent_.row * (map_.width() + 1) + agent_.col)] = '@';
  return s;
}

void GridEnvironmentBase::check_step(int action) const {
  if (done_) throw std::logic_error(spec_.name + ": step() called on a finished episode");
  if (action < 0 || action >= spec_.num_actions)
    throw std::out_of_range(spec_.name + ": action " + std::to_string(action) + " out of range");
}

Transition GridEnvironmentBase::begin_episode() {
  t_ = 0;
  done_ = spec_.max_episode_len == 1;
  Transition tr;
  tr.timestep = 0;
  tr.done = done_;
  tr.outcome = done_ ? Outcome::Timeout : Outcome::Running;
  fill_observations(tr);
  return tr;
}

Transition GridEnvironmentBase::finish_step(double reward, Outcome outcome) {
  ++t_;
  Transition tr;
  tr.reward = reward;
  tr.timestep = t_;
  tr.outcome = outcome;
  if (outcome == Outcome::Running && t_ + 1 >= spec_.max_episode_len) tr.outcome = Outcome::Timeout;
  tr.done = tr.outcome != Outcome::Running;
  done_ = tr.done;
  fill_observations(tr);
  return tr;
}

// ---------------------------------------------------------------- Tiger Door

namespace {
const std::vector<std::string> kTigerDoorRows = {
    "#######",
    "#A...B#",
    "###.###",
    "##P.###",
    "###.###",
    "###S###",
    "#######",
};
}  // namespace

TigerDoor::TigerDoor() {
  map_ = GridMap::parse(kTigerDoorRows);
  index_open_cells(map_, open_, open_index_);
  const int n = static_cast<int>(open_.size());
  spec_ = {"tiger_door", 4, 2 * n, 3 * n, 100, 0.9};
}

Transition TigerDoor::reset(std::uint64_t seed) {
  rng_.seed(derive_seed(seed, "tiger_door.reset"));
  const GridPos a = map_.find(Cell::GoalCandidateA).front();
  const GridPos b = map_.find(Cell::GoalCandidateB).front();
  const bool goal_is_a = uniform01(rng_) < 0.5;
  goal_ = goal_is_a ? a : b;
  failure_ = goal_is_a ? b : a;
  agent_ = map_.find(Cell::Start).front();
  revealed_ = false;
  return begin_episode();
}

Transition TigerDoor::step(int action) {
  check_step(action);
  GridPos next = agent_ + kMoves[static_cast<std::size_t>(action)];
  if (map_.at(next) != Cell::Wall) agent_ = next;
  if (map_.at(agent_) == Cell::Button) revealed_ = true;
  if (agent_ == goal_) return finish_step(1.0, Outcome::Success);
  if (agent_ == failure_) return finish_step(-1.0, Outcome::Failure);
  return finish_step(0.0, Outcome::Running);
}

void TigerDoor::fill_observations(Transition& tr) {
  const int n = static_cast<int>(open_.size());
  tr.privileged_obs = ObsVector::Zero(3 * n);
  auto idx = [&](GridPos p) { return open_index_[static_cast<std::size_t>(map_.index(p))]; };
  tr.privileged_obs[idx(agent_)] = 1.0f;
  if (revealed_) {
    tr.privileged_obs[n + idx(goal_)] = 1.0f;
    tr.privileged_obs[n + idx(failure_)] = -1.0f;
  }
  tr.privileged_obs[2 * n + idx(goal_)] = 1.0f;
  tr.privileged_obs[2 * n + idx(failure_)] = -1.0f;
  tr.student_obs = tr.privileged_obs.head(2 * n);
}

NavigationProblem TigerDoor::navigation(const ObsVector& privileged_obs) const {
  const int n = static_cast<int>(open_.size());
  NavigationProblem nav = open_cell_navigation(map_, open_, open_index_);
  nav.current = argmax_index(privileged_obs.head(n));
  const auto identity = privileged_obs.segment(2 * n, n);
  for (int i = 0; i < n; ++i) {
    if (identity[i] > 0.5f) nav.goal[static_cast<std::size_t>(i)] = true;
  }
  for (int i = 0; i < n; ++i)
    if (identity[i] < -0.5f) mark_fatal(nav, i);
  return nav;
}

// ---------------------------------------------------------------- Lava Crossing

LavaCrossing::LavaCrossing(int num_rivers) : num_rivers_(num_rivers) {
  if (num_rivers < 0 || num_rivers > 12)
    throw std::invalid_argument("LavaCrossing: num_rivers must lie in [0, 12]");
  map_ = GridMap(kSize, kSize, Cell::Floor);
  const int cells = kSize * kSize;
  const int student = kView * kView * 3 + 4;
  spec_ = {"lava_crossing", 4, student, student + 3 * cells, 225, 0.9};
}

void LavaCrossing::generate() {
  map_ = GridMap(kSize, kSize, Cell::Floor);
  for (int i = 0; i < kSize; ++i) {
    map_.set({0, i}, Cell::Wall);
    map_.set({kSize - 1, i}, Cell::Wall);
    map_.set({i, 0}, Cell::Wall);
    map_.set({i, kSize - 1}, Cell::Wall);
  }
  // Candidate rivers sit on even rows/columns; each gets exactly one gap and
  // the gaps are laid out along a monotone path from start to goal.
  std::vector<std::pair<bool, int>> candidates;  // (vertical, coordinate)
  for (int k = 2; k <= kSize - 3; k += 2) {
    candidates.emplace_back(true, k);
    candidates.emplace_back(false, k);
  }
  shuffle(candidates, rng_);
  std::vector<int> rivers_v, rivers_h;
  for (int i = 0; i < num_rivers_; ++i) {
    auto [vertical, coord] = candidates[static_cast<std::size_t>(i)];
    (vertical ? rivers_v : rivers_h).push_back(coord);
  }
  std::sort(rivers_v.begin(), rivers_v.end());
  std::sort(rivers_h.begin(), rivers_h.end());
  for (int k = 1; k < kSize - 1; ++k) {
    for (int col : rivers_v) map_.set({k, col}, Cell::Lava);
    for (int row : rivers_h) map_.set({row, k}, Cell::Lava);
  }
  std::vector<bool> path;  // true: cross a vertical river with a horizontal move
  path.insert(path.end(), rivers_v.size(), true);
  path.insert(path.end(), rivers_h.size(), false);
  shuffle(path, rng_);
  std::vector<int> limits_v{0}, limits_h{0};
  limits_v.insert(limits_v.end(), rivers_v.begin(), rivers_v.end());
  limits_h.insert(limits_h.end(), rivers_h.begin(), rivers_h.end());
  limits_v.push_back(kSize - 1);
  limits_h.push_back(kSize - 1);
  std::size_t room_i = 0, room_j = 0;
  for (bool horizontal_move : path) {
    GridPos gap;
    if (horizontal_move) {
      const int lo = limits_h[room_j] + 1, hi = limits_h[room_j + 1] - 1;
      gap = {lo + uniform_int(rng_, hi - lo + 1), limits_v[room_i + 1]};
      ++room_i;
    } else {
      const int lo = limits_v[room_i] + 1, hi = limits_v[room_i + 1] - 1;
      gap = {limits_h[room_j + 1], lo + uniform_int(rng_, hi - lo + 1)};
      ++room_j;
    }
    map_.set(gap, Cell::Floor);
  }
  map_.set({1, 1}, Cell::Start);
  map_.set(goal_cell(), Cell::Goal);
}

Transition LavaCrossing::reset(std::uint64_t seed) {
  rng_.seed(derive_seed(seed, "lava_crossing.reset"));
  generate();
  agent_ = {1, 1};
  orientation_ = 1;
  return begin_episode();
}

Transition LavaCrossing::step(int action) {
  check_step(action);
  orientation_ = action;
  GridPos next = agent_ + kMoves[static_cast<std::size_t>(action)];
  if (map_.at(next) != Cell::Wall) agent_ = next;
  const Cell here = map_.at(agent_);
  if (here == Cell::Lava) return finish_step(-1.0, Outcome::Failure);
  if (here == Cell::Goal) return finish_step(1.0, Outcome::Success);
  return finish_step(0.0, Outcome::Running);
}

void LavaCrossing::fill_observations(Transition& tr) {
  const int cells = kSize * kSize;
  const int student = spec_.student_obs_dim;
  tr.privileged_obs = ObsVector::Zero(spec_.privileged_obs_dim);
  const GridPos forward = kMoves[static_cast<std::size_t>(orientation_)];
  const GridPos right = kMoves[static_cast<std::size_t>((orientation_ + 1) % 4)];
  for (int i = 0; i < kView; ++i) {
    const int ahead = kView - 1 - i;
    for (int j = 0; j < kView; ++j) {
      const int lateral = j - kView / 2;
      const GridPos p{agent_.row + ahead * forward.row + lateral * right.row,
                      agent_.col + ahead * forward.col + lateral * right.col};
      const int base = (i * kView + j) * 3;
      const Cell c = map_.in_bounds(p) ? map_.at(p) : Cell::Wall;
      if (c == Cell::Wall) tr.privileged_obs[base] = 1.0f;
      if (c == Cell::Lava) tr.privileged_obs[base + 1] = 1.0f;
      if (c == Cell::Goal) tr.privileged_obs[base + 2] = 1.0f;
    }
  }
  tr.privileged_obs[kView * kView * 3 + orientation_] = 1.0f;
  for (int k = 0; k < cells; ++k) {
    const Cell c = map_.at(map_.position(k));
    if (c == Cell::Lava) tr.privileged_obs[student + k] = 1.0f;
    if (c == Cell::Goal) tr.privileged_obs[student + cells + k] = 1.0f;
  }
  tr.privileged_obs[student + 2 * cells + map_.index(agent_)] = 1.0f;
  tr.student_obs = tr.privileged_obs.head(student);
}

NavigationProblem LavaCrossing::navigation(const ObsVector& privileged_obs) const {
  const int cells = kSize * kSize;
  const int student = spec_.student_obs_dim;
  const auto lava = privileged_obs.segment(student, cells);
  const auto goal = privileged_obs.segment(student + cells, cells);
  NavigationProblem nav;
  nav.num_nodes = cells;
  nav.num_actions = 4;
  nav.current = argmax_index(privileged_obs.segment(student + 2 * cells, cells));
  nav.successor.resize(static_cast<std::size_t>(cells) * 4);
  nav.goal.assign(static_cast<std::size_t>(cells), false);
  auto is_border = [](GridPos p) {
    return p.row <= 0 || p.col <= 0 || p.row >= kSize - 1 || p.col >= kSize - 1;
  };
  for (int k = 0; k < cells; ++k) {
    const GridPos p{k / kSize, k % kSize};
    nav.goal[static_cast<std::size_t>(k)] = goal[k] > 0.5f;
    for (int a = 0; a < 4; ++a) {
      GridPos q = p + kMoves[static_cast<std::size_t>(a)];
      if (is_border(q)) q = p;
      const int target = q.row * kSize + q.col;
      nav.successor[static_cast<std::size_t>(k * 4 + a)] = lava[target] > 0.5f ? -1 : target;
    }
  }
  return nav;
}

// ---------------------------------------------------------------- Memory

namespace {
const std::vector<std::string> kMemoryRows = {
    "###########",
    "###########",
    "###########",
    "########O##",
    "######R#.##",
    "#S.......##",
    "########.##",
    "########O##",
    "###########",
    "###########",
    "###########",
};
}  // namespace

Memory::Memory() {
  map_ = GridMap::parse(kMemoryRows);
  index_open_cells(map_, open_, open_index_);
  const auto objects = map_.find(Cell::ObjectSlot);
  slots_ = {objects[0], objects[1]};
  const int n = static_cast<int>(open_.size());
  spec_ = {"memory", 4, n + 2, n + 4, 121, 0.9};
}

Transition Memory::reset(std::uint64_t seed) {
  rng_.seed(derive_seed(seed, "memory.reset"));
  cue_ = uniform01(rng_) < 0.5 ? 0 : 1;
  agent_ = map_.find(Cell::Start).front();
  return begin_episode();
}

Transition Memory::step(int action) {
  check_step(action);
  GridPos next = agent_ + kMoves[static_cast<std::size_t>(action)];
  if (map_.at(next) != Cell::Wall) agent_ = next;
  if (agent_ == slots_[static_cast<std::size_t>(cue_)]) return finish_step(1.0, Outcome::Success);
  if (agent_ == slots_[static_cast<std::size_t>(1 - cue_)]) return finish_step(-1.0, Outcome::Failure);
  return finish_step(0.0, Outcome::Running);
}

void Memory::fill_observations(Transition& tr) {
  const int n = static_cast<int>(open_.size());
  tr.privileged_obs = ObsVector::Zero(n + 4);
  tr.privileged_obs[open_index_[static_cast<std::size_t>(map_.index(agent_))]] = 1.0f;
  if (in_room()) tr.privileged_obs[n + cue_] = 1.0f;
  tr.privileged_obs[n + 2 + cue_] = 1.0f;
  tr.student_obs = tr.privileged_obs.head(n + 2);
}

NavigationProblem Memory::navigation(const ObsVector& privileged_obs) const {
  const int n = static_cast<int>(open_.size());
  NavigationProblem nav = open_cell_navigation(map_, open_, open_index_);
  nav.current = argmax_index(privileged_obs.head(n));
  const int cue = privileged_obs[n + 3] > 0.5f ? 1 : 0;
  auto idx = [&](GridPos p) { return open_index_[static_cast<std::size_t>(map_.index(p))]; };
  nav.goal[static_cast<std::size_t>(idx(slots_[static_cast<std::size_t>(cue)]))] = true;
  mark_fatal(nav, idx(slots_[static_cast<std::size_t>(1 - cue)]));
  return nav;
}

// ---------------------------------------------------------------- Light-Dark

LightDark::LightDark() {
  map_ = GridMap(kSize, kSize, Cell::Dark);
  for (int r = 0; r < kSize; ++r)
    for (int c = kLitFrom; c < kSize; ++c) map_.set({r, c}, Cell::Lit);
  map_.set(goal_, Cell::Goal);
  const int student = 2 * (kSize + 2) + 1;
  spec_ = {"light_dark", 4, student, student + 2 * kSize, 100, 0.9};
}

Transition LightDark::reset(std::uint64_t seed) {
  rng_.seed(derive_seed(seed, "light_dark.reset"));
  do {
    agent_ = {uniform_int(rng_, kSize), uniform_int(rng_, kLitFrom)};
  } while (agent_ == goal_);
  return begin_episode();
}

Transition LightDark::step(int action) {
  check_step(action);
  GridPos next = agent_ + kMoves[static_cast<std::size_t>(action)];
  if (map_.in_bounds(next)) agent_ = next;
  if (agent_ == goal_) return finish_step(1.0, Outcome::Success);
  return finish_step(0.0, Outcome::Running);
}

void LightDark::fill_observations(Transition& tr) {
  reported_ = agent_;
  if (!lit(agent_)) {
    reported_.row += uniform_int(rng_, 3) - 1;
    reported_.col += uniform_int(rng_, 3) - 1;
  }
  const int span = kSize + 2;
  const int student = 2 * span + 1;
  tr.privileged_obs = ObsVector::Zero(spec_.privileged_obs_dim);
  tr.privileged_obs[reported_.col + 1] = 1.0f;
  tr.privileged_obs[span + reported_.row + 1] = 1.0f;
  tr.privileged_obs[2 * span] = lit(agent_) ? 1.0f : 0.0f;
  tr.privileged_obs[student + agent_.col] = 1.0f;
  tr.privileged_obs[student + kSize + agent_.row] = 1.0f;
  tr.student_obs = tr.privileged_obs.head(student);
}

NavigationProblem LightDark::navigation(const ObsVector& privileged_obs) const {
  const int student = 2 * (kSize + 2) + 1;
  const int col = argmax_index(privileged_obs.segment(student, kSize));
  const int row = argmax_index(privileged_obs.segment(student + kSize, kSize));
  NavigationProblem nav;
  nav.num_nodes = kSize * kSize;
  nav.num_actions = 4;
  nav.current = row * kSize + col;
  nav.successor.resize(static_cast<std::size_t>(nav.num_nodes) * 4);
  nav.goal.assign(static_cast<std::size_t>(nav.num_nodes), false);
  nav.goal[static_cast<std::size_t>(map_.index(goal_))] = true;
  for (int k = 0; k < nav.num_nodes; ++k) {
    const GridPos p = map_.position(k);
    for (int a = 0; a < 4; ++a) {
      GridPos q = p + kMoves[static_cast<std::size_t>(a)];
      if (!map_.in_bounds(q)) q = p;
      nav.successor[static_cast<std::size_t>(k * 4 + a)] = map_.index(q);
    }
  }
  return nav;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<NavigableEnvironment> make_tiger_door() { return std::make_unique<TigerDoor>(); }
std::unique_ptr<NavigableEnvironment> make_lava_crossing(int num_rivers) {
  return std::make_unique<LavaCrossing>(num_rivers);
}
std::unique_ptr<NavigableEnvironment> make_memory() { return std::make_unique<Memory>(); }
std::unique_ptr<NavigableEnvironment> make_light_dark() { return std::make_unique<LightDark>(); }

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names{"tiger_door", "lava_crossing", "memory",
                                              "light_dark"};
  return names;
}

std::unique_ptr<NavigableEnvironment> make_env(std::string_view name) {
  if (name == "tiger_door") return make_tiger_door();
  if (name == "lava_crossing") return make_lava_crossing();
  if (name == "memory") return make_memory();
  if (name == "light_dark") return make_light_dark();
  throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

}  // namespace tgrl
