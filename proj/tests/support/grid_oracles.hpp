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


// Grid oracles written independently of the library's own search code.

#ifndef TGRL_TESTS_GRID_ORACLES_HPP
#define TGRL_TESTS_GRID_ORACLES_HPP

#include "tgrl/gridworld.hpp"

#include <optional>
#include <queue>
#include <set>
#include <vector>

namespace tgrl::testing {


// Action sequence from the agent to `target` over floor-like cells; lava and
// walls are impassable except as the final cell.
inline std::optional<std::vector<int>> grid_path(const GridMap& map, GridPos from, GridPos target) {
  std::vector<int> parent_action(static_cast<std::size_t>(map.width() * map.height()), -1);
  std::vector<bool> seen(parent_action.size(), false);
  std::queue<GridPos> frontier;
  frontier.push(from);
  seen[static_cast<std::size_t>(map.index(from))] = true;
  while (!frontier.empty()) {
    const GridPos p = frontier.front();
    frontier.pop();
    if (p == target) break;
    for (int a = 0; a < 4; ++a) {
      const GridPos q = p + kMoves[static_cast<std::size_t>(a)];
      if (!map.in_bounds(q) || seen[static_cast<std::size_t>(map.index(q))]) continue;
      const Cell c = map.at(q);
      if (c == Cell::Wall) continue;
      if (c == Cell::Lava && !(q == target)) continue;
      seen[static_cast<std::size_t>(map.index(q))] = true;
      parent_action[static_cast<std::size_t>(map.index(q))] = a;
      frontier.push(q);
    }
  }
  if (!seen[static_cast<std::size_t>(map.index(target))]) return std::nullopt;
  std::vector<int> actions;
  for (GridPos p = target; !(p == from);) {
    const int a = parent_action[static_cast<std::size_t>(map.index(p))];
    actions.insert(actions.begin(), a);
    p = p + kMoves[static_cast<std::size_t>((a + 2) % 4)];
  }
  return actions;
}

inline bool reachable_by_dfs(const GridMap& map, GridPos from, GridPos to) {
  std::set<std::pair<int, int>> seen;
  std::vector<GridPos> stack{from};
  while (!stack.empty()) {
    const GridPos p = stack.back();
    stack.pop_back();
    if (!map.in_bounds(p) || !seen.insert({p.row, p.col}).second) continue;
    const Cell c = map.at(p);
    if (c == Cell::Wall || c == Cell::Lava) continue;
    if (p == to) return true;
    for (int dr : {-1, 1}) stack.push_back({p.row + dr, p.col});
    for (int dc : {-1, 1}) stack.push_back({p.row, p.col + dc});
  }
  return false;
}

// Shortest path length over the grid treating `blocked` cells like walls;
// -1 when `to` is unreachable.
inline int bfs_distance(const GridMap& map, GridPos from, GridPos to,
                        const std::vector<GridPos>& blocked = {}) {
  std::vector<int> dist(static_cast<std::size_t>(map.width() * map.height()), -1);
  auto is_blocked = [&](GridPos p) {
    for (const auto& b : blocked)
      if (b == p) return true;
    const Cell c = map.at(p);
    return c == Cell::Wall || c == Cell::Lava;
  };
  std::queue<GridPos> frontier;
  frontier.push(from);
  dist[static_cast<std::size_t>(map.index(from))] = 0;
  while (!frontier.empty()) {
    const GridPos p = frontier.front();
    frontier.pop();
    if (p == to) return dist[static_cast<std::size_t>(map.index(p))];
    for (const GridPos m : kMoves) {
      const GridPos q = p + m;
      if (!map.in_bounds(q) || is_blocked(q) || dist[static_cast<std::size_t>(map.index(q))] >= 0)
        continue;
      dist[static_cast<std::size_t>(map.index(q))] = dist[static_cast<std::size_t>(map.index(p))] + 1;
      frontier.push(q);
    }
  }
  return -1;
}

}  // namespace tgrl::testing

#endif  // TGRL_TESTS_GRID_ORACLES_HPP
