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

#include "tgrl/config.hpp"

#include "tgrl/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tgrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
  return out;
}

long long to_integer(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  const long long x = to_integer(key, v);
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(std::string(key), "integer out of range");
  return static_cast<int>(x);
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v) {
            // Key name is patched in by RunConfig::set when this throws.
            if constexpr (std::is_same_v<T, double>)
              c.*member = to_double("", v);
            else
              c.*member = to_int("", v);
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              return format_double(c.*member);
            else
              return std::to_string(c.*member);
          }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"env", {[](RunConfig& c, std::string_view v) { c.env = v; },
               [](const RunConfig& c) { return c.env; }}},
      {"algorithm", {[](RunConfig& c, std::string_view v) { c.algorithm = parse_algorithm(v); },
                     [](const RunConfig& c) { return std::string(algorithm_name(c.algorithm)); }}},
      {"seed", {[](RunConfig& c, std::string_view v) {
                  const long long s = to_integer("", v);
                  if (s < 0) throw ConfigError("", "must be non-negative");
                  c.seed = static_cast<std::uint64_t>(s);
                },
                [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"alpha", number(&RunConfig::alpha)},
      {"lambda_init", number(&RunConfig::lambda_init)},
      {"mu", number(&RunConfig::mu)},
      {"c_clip", number(&RunConfig::c_clip)},
      {"temperature", number(&RunConfig::temperature)},
      {"epsilon_greedy", number(&RunConfig::epsilon_greedy)},
      {"window", number(&RunConfig::window)},
      {"gamma", number(&RunConfig::gamma)},
      {"lr", number(&RunConfig::lr)},
      {"batch_size", number(&RunConfig::batch_size)},
      {"n_collect", number(&RunConfig::n_collect)},
      {"n_update", number(&RunConfig::n_update)},
      {"buffer_capacity", number(&RunConfig::buffer_capacity)},
      {"buffer_mode", {[](RunConfig& c, std::string_view v) {
                         if (v == "joint")
                           c.buffer_mode = BufferMode::Joint;
                         else if (v == "separate")
                           c.buffer_mode = BufferMode::Separate;
                         else
                           throw ConfigError("", "expected joint or separate");
                       },
                       [](const RunConfig& c) { return to_string(c.buffer_mode); }}},
      {"teacher_target_success", number(&RunConfig::teacher_target_success)},
      {"eps_smooth", number(&RunConfig::eps_smooth)},
      {"hidden", {[](RunConfig& c, std::string_view v) {
                    std::vector<int> sizes;
                    while (!v.empty()) {
                      const auto comma = v.find(',');
                      sizes.push_back(to_int("", trim(v.substr(0, comma))));
                      if (comma == std::string_view::npos) break;
                      v.remove_prefix(comma + 1);
                    }
                    c.hidden = std::move(sizes);
                  },
                  [](const RunConfig& c) {
                    std::string s;
                    for (std::size_t i = 0; i < c.hidden.size(); ++i)
                      s += (i ? "," : "") + std::to_string(c.hidden[i]);
                    return s;
                  }}},
      {"tau", number(&RunConfig::tau)},
      {"iterations", number(&RunConfig::iterations)},
      {"eval_episodes", number(&RunConfig::eval_episodes)},
      {"eval_every", number(&RunConfig::eval_every)},
      {"fixed_coefficient", {[](RunConfig& c, std::string_view v) {
                               if (v.empty() || v == "none")
                                 c.fixed_coefficient.reset();
                               else
                                 c.fixed_coefficient = to_double("", v);
                             },
                             [](const RunConfig& c) {
                               return c.fixed_coefficient ? format_double(*c.fixed_coefficient)
                                                          : std::string("none");
                             }}},
      {"perf_diff_batch", number(&RunConfig::perf_diff_batch)},
      {"perf_diff_critic", {[](RunConfig& c, std::string_view v) {
                              if (v == "own")
                                c.perf_diff_critic = PerfDiffCritic::Own;
                              else if (v == "shared")
                                c.perf_diff_critic = PerfDiffCritic::Shared;
                              else
                                throw ConfigError("", "expected own or shared");
                            },
                            [](const RunConfig& c) {
                              return std::string(c.perf_diff_critic == PerfDiffCritic::Own ? "own" : "shared");
                            }}},
      {"perf_diff_method", {[](RunConfig& c, std::string_view v) {
                              if (v == "replay")
                                c.perf_diff_method = PerfDiffMethod::ReplayAdvantage;
                              else if (v == "monte_carlo")
                                c.perf_diff_method = PerfDiffMethod::MonteCarlo;
                              else
                                throw ConfigError("", "expected replay or monte_carlo");
                            },
                            [](const RunConfig& c) {
                              return std::string(c.perf_diff_method == PerfDiffMethod::ReplayAdvantage
                                                     ? "replay"
                                                     : "monte_carlo");
                            }}},
      {"cosil_target", number(&RunConfig::cosil_target)},
      {"cosil_alpha_init", number(&RunConfig::cosil_alpha_init)},
      {"cosil_lr", number(&RunConfig::cosil_lr)},
      {"advisor_beta", number(&RunConfig::advisor_beta)},
      {"pbrs_il_iterations", number(&RunConfig::pbrs_il_iterations)},
      {"pbrs_value_episodes", number(&RunConfig::pbrs_value_episodes)},
      {"pbrs_value_steps", number(&RunConfig::pbrs_value_steps)},
      {"lava_rivers", number(&RunConfig::lava_rivers)},
      {"output", {[](RunConfig& c, std::string_view v) { c.output = v; },
                  [](const RunConfig& c) { return c.output; }}},
      {"checkpoint", {[](RunConfig& c, std::string_view v) { c.checkpoint = v; },
                      [](const RunConfig& c) { return c.checkpoint; }}},
  };
  return table;
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Tgrl: return "tgrl";
    case Algorithm::Il: return "il";
    case Algorithm::Cosil: return "cosil";
    case Algorithm::Advisor: return "advisor";
    case Algorithm::Pbrs: return "pbrs";
    case Algorithm::RlOnly: return "rl_only";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::Tgrl, Algorithm::Il, Algorithm::Cosil, Algorithm::Advisor,
                      Algorithm::Pbrs, Algorithm::RlOnly})
    if (name == algorithm_name(a)) return a;
  throw ConfigError("algorithm", "unknown algorithm '" + std::string(name) + "'");
}

std::string to_string(BufferMode mode) {
  return mode == BufferMode::Joint ? "joint" : "separate";
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(std::string(key), "unknown key");
  try {
    it->second.set(*this, trim(value));
  } catch (const ConfigError& e) {
    if (!e.field().empty()) throw;
    std::string what = e.what();
    throw ConfigError(std::string(key), what.substr(what.find(": ") + 2));
  }
}

std::string RunConfig::get(std::string_view key) const {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(std::string(key), "unknown key");
  return it->second.get(*this);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return names;
}

void RunConfig::validate() const {
  const auto& names = env_names();
  require(std::find(names.begin(), names.end(), env) != names.end(), "env", "unknown environment");
  require(alpha > 0.0, "alpha", "must be positive");
  require(lambda_init >= 0.0, "lambda_init", "must be non-negative");
  require(mu > 0.0, "mu", "must be positive");
  require(c_clip > 0.0, "c_clip", "must be positive");
  require(temperature > 0.0, "temperature", "must be positive");
  require(epsilon_greedy >= 0.0 && epsilon_greedy <= 1.0, "epsilon_greedy", "must lie in [0, 1]");
  require(window >= 1 && window <= 64, "window", "must lie in [1, 64]");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
  require(lr > 0.0 && lr < 1.0, "lr", "must lie in (0, 1)");
  require(batch_size >= 1, "batch_size", "must be positive");
  require(n_collect >= 1, "n_collect", "must be positive");
  require(n_update >= 0, "n_update", "must be non-negative");
  require(buffer_capacity >= 1, "buffer_capacity", "must be positive");
  require(teacher_target_success >= 0.0 && teacher_target_success <= 1.0, "teacher_target_success",
          "must lie in [0, 1]");
  require(eps_smooth > 0.0 && eps_smooth < 0.5, "eps_smooth", "must lie in (0, 0.5)");
  require(!hidden.empty(), "hidden", "needs at least one layer");
  for (int h : hidden) require(h >= 1 && h <= 4096, "hidden", "layer sizes must lie in [1, 4096]");
  require(tau > 0.0 && tau <= 1.0, "tau", "must lie in (0, 1]");
  require(iterations >= 1, "iterations", "must be positive");
  require(eval_episodes >= 1, "eval_episodes", "must be positive");
  require(eval_every >= 1, "eval_every", "must be positive");
  if (fixed_coefficient)
    require(*fixed_coefficient > 0.0 && *fixed_coefficient <= alpha, "fixed_coefficient",
            "must lie in (0, alpha]");
  require(perf_diff_batch >= 0, "perf_diff_batch", "must be non-negative (0 uses the whole buffer)");
  require(cosil_alpha_init >= 0.0, "cosil_alpha_init", "must be non-negative");
  require(cosil_lr > 0.0, "cosil_lr", "must be positive");
  require(advisor_beta > 0.0, "advisor_beta", "must be positive");
  require(algorithm != Algorithm::Pbrs || (pbrs_il_iterations >= 1 && pbrs_il_iterations < iterations),
          "pbrs_il_iterations", "must lie in [1, iterations)");
  require(pbrs_value_episodes >= 1, "pbrs_value_episodes", "must be positive");
  require(pbrs_value_steps >= 0, "pbrs_value_steps", "must be non-negative");
  require(lava_rivers >= 1 && lava_rivers <= 3, "lava_rivers", "must lie in [1, 3]");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(assignment), "override must look like key=value");
  config.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

}  // namespace tgrl
