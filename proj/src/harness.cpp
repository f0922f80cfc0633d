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

#include "tgrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace tgrl {

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(10);
  os << *v;
  return os.str();
}

std::string cell(double v) { return cell(std::optional<double>(v)); }

std::string output_for(const std::string& base, const std::string& suffix) {
  namespace fs = std::filesystem;
  const fs::path p(base);
  fs::path out = p.parent_path() / (p.stem().string() + suffix);
  out += p.has_extension() ? p.extension() : fs::path(".csv");
  return out.string();
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "iteration", "env_steps",      "algorithm",      "seed",
      "success_rate_pi", "success_rate_pi_r", "mean_return_pi", "lambda",
      "effective_coef", "perf_diff_estimate", "q_r_loss", "q_e_loss",
      "mean_cross_entropy"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : metrics_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::string to_csv(const MetricsRow& r) {
  std::ostringstream os;
  os << r.iteration << ',' << r.env_steps << ',' << r.algorithm << ',' << r.seed << ','
     << cell(r.success_rate_pi) << ',' << cell(r.success_rate_pi_r) << ',' << cell(r.mean_return_pi)
     << ',' << cell(r.lambda) << ',' << cell(r.effective_coef) << ',' << cell(r.perf_diff_estimate)
     << ',' << cell(r.q_r_loss) << ',' << cell(r.q_e_loss) << ',' << cell(r.mean_cross_entropy);
  return os.str();
}

double RunResult::final_success() const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    if (it->success_rate_pi) return *it->success_rate_pi;
  return 0.0;
}

std::optional<int> RunResult::first_aux_success_at(double threshold) const {
  for (const auto& r : rows)
    if (r.success_rate_pi_r && *r.success_rate_pi_r >= threshold) return r.iteration;
  return std::nullopt;
}

RunResult run(const RunConfig& config, std::ostream* progress) {
  config.validate();
  RunResult result;
  std::ofstream csv;
  if (!config.output.empty()) {
    const auto parent = std::filesystem::path(config.output).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    csv.open(config.output);
    if (!csv) throw std::runtime_error("cannot write " + config.output);
    csv << csv_header() << '\n';
  }
  if (progress) *progress << csv_header() << '\n';
  auto emit = [&](const MetricsRow& row) {
    result.rows.push_back(row);
    if (csv.is_open()) csv << to_csv(row) << '\n' << std::flush;
    if (progress) *progress << to_csv(row) << '\n' << std::flush;
  };

  result.learner = std::make_unique<Learner>(config);
  Learner& learner = *result.learner;
  const bool dual = config.algorithm == Algorithm::Tgrl;
  const bool has_coef = dual || config.algorithm == Algorithm::Cosil;
  std::optional<double> success_pi, success_pi_r, return_pi;
  for (int i = 0; i < config.iterations; ++i) {
    MetricsRow row;
    row.algorithm = algorithm_name(config.algorithm);
    row.seed = config.seed;
    try {
      const IterationMetrics m = learner.iterate();
      row.iteration = m.iteration;
      row.env_steps = m.env_steps;
      if (dual) row.lambda = m.lambda;
      if (has_coef) row.effective_coef = m.effective_coef;
      row.perf_diff_estimate = m.perf_diff;
      row.q_r_loss = m.q_r_loss;
      row.q_e_loss = m.q_e_loss;
      row.mean_cross_entropy = m.mean_cross_entropy;
      for (double v : {m.lambda, m.effective_coef, m.q_r_loss, m.q_e_loss, m.mean_cross_entropy,
                       m.perf_diff.value_or(0.0)})
        if (!std::isfinite(v)) throw std::domain_error("non-finite training metric");
    } catch (const std::domain_error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.iteration = learner.iteration();
      row.env_steps = learner.env_steps();
      row.q_r_loss = row.q_e_loss = row.mean_cross_entropy = nan;
      row.success_rate_pi = success_pi;
      row.success_rate_pi_r = success_pi_r;
      row.mean_return_pi = return_pi;
      emit(row);
      result.ok = false;
      result.error = e.what();
      return result;
    }
    if ((i + 1) % config.eval_every == 0 || i + 1 == config.iterations) {
      const std::uint64_t eval_seed = derive_seed(config.seed, "eval.round", static_cast<std::uint64_t>(i));
      const EvalResult e = evaluate(learner.main_policy(), learner.env(), config.eval_episodes, eval_seed);
      success_pi = e.success_rate();
      return_pi = e.mean_return;
      if (learner.has_aux_policy())
        success_pi_r =
            evaluate(learner.aux_policy(), learner.env(), config.eval_episodes, eval_seed).success_rate();
    }
    row.success_rate_pi = success_pi;
    row.success_rate_pi_r = success_pi_r;
    row.mean_return_pi = return_pi;
    emit(row);
  }
  if (!config.checkpoint.empty()) save_checkpoint(config.checkpoint, learner);
  return result;
}

SweepResult sweep(const RunConfig& base, const std::string& field,
                  const std::vector<std::string>& values, std::ostream* progress) {
  const auto& keys = RunConfig::keys();
  if (std::find(keys.begin(), keys.end(), field) == keys.end())
    throw ConfigError(field, "unknown key");
  if (values.empty()) throw ConfigError(field, "no sweep values");
  SweepResult result;
  result.field = field;
  for (const auto& value : values) {
    RunConfig config = base;
    config.set(field, value);
    SweepEntry entry;
    entry.value = value;
    if (!base.output.empty()) {
      config.output = output_for(base.output, "_" + field + "-" + value);
      entry.output = config.output;
    }
    if (!base.checkpoint.empty()) config.checkpoint = output_for(base.checkpoint, "_" + field + "-" + value);
    try {
      const RunResult r = run(config, progress);
      entry.ok = r.ok;
      entry.error = r.error;
      entry.final_success = r.final_success();
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
    }
    result.entries.push_back(entry);
  }
  double total = 0.0;
  for (const auto& e : result.entries) {
    result.best = std::max(result.best, e.final_success);
    total += e.final_success;
  }
  result.mean = total / static_cast<double>(result.entries.size());
  if (!base.output.empty()) {
    std::ofstream out(output_for(base.output, "_summary"));
    out << field << ",ok,final_success,output\n";
    for (const auto& e : result.entries)
      out << e.value << ',' << (e.ok ? 1 : 0) << ',' << cell(e.final_success) << ',' << e.output << '\n';
    out << "best,," << cell(result.best) << ",\n";
    out << "mean,," << cell(result.mean) << ",\n";
  }
  return result;
}

void save_checkpoint(const std::string& path, const Learner& learner) {
  const PolicySnapshot policy = learner.main_policy();
  std::vector<const Mlp<float>*> nets;
  for (const auto& n : policy.nets()) nets.push_back(&n);
  save_networks(path, nets);
  std::ofstream side(path + ".dual");
  if (!side) throw std::runtime_error("checkpoint: cannot write " + path + ".dual");
  side.precision(17);
  const auto& d = learner.dual();
  const auto& c = learner.config();
  side << "env = " << c.env << '\n'
       << "lava_rivers = " << c.lava_rivers << '\n'
       << "algorithm = " << algorithm_name(c.algorithm) << '\n'
       << "alpha = " << d.alpha << '\n'
       << "lambda = " << d.lambda << '\n'
       << "mu = " << d.mu << '\n'
       << "diff_normalizer = " << d.diff_normalizer << '\n'
       << "normalizer_updates = " << d.normalizer_updates << '\n'
       << "frozen = " << (d.frozen ? 1 : 0) << '\n'
       << "effective_coef = " << d.effective_coefficient() << '\n'
       << "temperature = " << policy.temperature() << '\n'
       << "window = " << policy.window() << '\n'
       << "obs_dim = " << policy.obs_dim() << '\n'
       << "num_actions = " << policy.num_actions() << '\n'
       << "weights =";
  for (double w : policy.weights()) side << ' ' << w;
  side << '\n';
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream side(path + ".dual");
  if (!side) throw std::runtime_error("checkpoint: missing sidecar " + path + ".dual");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(side, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("checkpoint: sidecar lacks '" + k + "'");
    return it->second;
  };
  LoadedCheckpoint out;
  out.env = need("env");
  out.lava_rivers = std::stoi(need("lava_rivers"));
  out.algorithm = parse_algorithm(need("algorithm"));
  out.dual.alpha = std::stod(need("alpha"));
  out.dual.lambda = std::stod(need("lambda"));
  out.dual.mu = std::stod(need("mu"));
  out.dual.diff_normalizer = std::stod(need("diff_normalizer"));
  out.dual.normalizer_updates = std::stol(need("normalizer_updates"));
  out.dual.frozen = need("frozen") == "1";
  std::vector<double> weights;
  std::istringstream ws(need("weights"));
  for (double w; ws >> w;) weights.push_back(w);
  out.policy = PolicySnapshot(load_networks<float>(path), weights, std::stod(need("temperature")),
                              std::stoi(need("window")), std::stoi(need("obs_dim")),
                              std::stoi(need("num_actions")));
  return out;
}

}  // namespace tgrl
