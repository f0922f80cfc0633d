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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Training budgets, seeds and
// tolerances are pinned below.
//
//   acceptance [--only 1,4,7] [--out DIR]

#include "support/gradcheck.hpp"
#include "support/tabular.hpp"
#include "tgrl/baselines.hpp"
#include "tgrl/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace {

using namespace tgrl;
using namespace tgrl::testing;

// ---------------------------------------------------------------- budgets

constexpr int kFinalEvalEpisodes = 1000;
constexpr std::uint64_t kFinalEvalSeed = 90210;

constexpr int kTigerIterations = 100;
constexpr int kTigerIlIterations = 60;
constexpr int kMemoryIterations = 200;
constexpr int kMemoryIlIterations = 60;
constexpr int kLavaIterations = 1000;
constexpr int kLavaWindow = 2;
constexpr int kSuboptimalIterations = 150;
constexpr int kLightDarkIterations = 16;
constexpr int kLightDarkEvalEvery = 1;
constexpr double kLightDarkThreshold = 0.9;
constexpr std::array<std::uint64_t, 5> kSeeds{0, 1, 2, 3, 4};

// ---------------------------------------------------------------- tolerances

constexpr double kIlLow = 0.40, kIlHigh = 0.60;
constexpr double kTgrlTiger = 0.95;
constexpr double kTgrlMemoryLava = 0.90;
constexpr double kIlMemoryMax = 0.65;
constexpr double kSuboptimalMin = 0.90;
constexpr double kLambdaSpread = 0.10;
constexpr double kFixedSlack = 0.05;
constexpr double kDualResidual = 1e-10;
constexpr double kPerfDiffTolerance = 0.02;
constexpr double kGradientTolerance = 1e-4;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------- training runs

struct Outcome {
  double final_success = 0.0;  // greedy pi over kFinalEvalEpisodes fresh episodes
  int successes = 0;
  std::vector<MetricsRow> rows;
  bool ok = true;
  std::string error;
};

class Runs {
 public:
  explicit Runs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const Outcome& get(const std::string& name, const RunConfig& config) {
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    RunConfig c = config;
    c.output = (dir_ / (name + ".csv")).string();
    const auto start = std::chrono::steady_clock::now();
    std::cerr << "  training " << name << " ..." << std::flush;
    Outcome out;
    RunResult r = run(c);
    out.rows = r.rows;
    out.ok = r.ok;
    out.error = r.error;
    if (r.ok) {
      const EvalResult e =
          evaluate(r.learner->main_policy(), r.learner->env(), kFinalEvalEpisodes, kFinalEvalSeed);
      out.final_success = e.success_rate();
      out.successes = e.successes;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << " success " << fmt(out.final_success) << " (" << fmt(secs, 0) << " s)\n";
    return cache_.emplace(name, std::move(out)).first->second;
  }

  const std::map<std::string, Outcome>& all() const { return cache_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, Outcome> cache_;
};

RunConfig base(const std::string& env, Algorithm algorithm, std::uint64_t seed, int iterations) {
  RunConfig c;
  c.env = env;
  c.algorithm = algorithm;
  c.seed = seed;
  c.iterations = iterations;
  c.eval_every = std::max(1, iterations / 10);
  c.eval_episodes = 50;
  if (env == "lava_crossing") c.window = kLavaWindow;
  return c;
}

std::string run_name(const std::string& env, Algorithm a, std::uint64_t seed, const std::string& extra = "") {
  return env + "_" + algorithm_name(a) + "_s" + std::to_string(seed) + extra;
}

// ---------------------------------------------------------------- criteria

Verdict imitation_gap(Runs& runs) {
  int il_hits = 0, tgrl_hits = 0, n = 0;
  for (auto seed : kSeeds) {
    il_hits += runs.get(run_name("tiger_door", Algorithm::Il, seed),
                        base("tiger_door", Algorithm::Il, seed, kTigerIlIterations)).successes;
    tgrl_hits += runs.get(run_name("tiger_door", Algorithm::Tgrl, seed),
                          base("tiger_door", Algorithm::Tgrl, seed, kTigerIterations)).successes;
    n += kFinalEvalEpisodes;
  }
  const double il = static_cast<double>(il_hits) / n, tgrl = static_cast<double>(tgrl_hits) / n;
  return {il >= kIlLow && il <= kIlHigh && tgrl >= kTgrlTiger,
          "IL " + fmt(il) + " in [" + fmt(kIlLow, 2) + ", " + fmt(kIlHigh, 2) + "], TGRL " + fmt(tgrl) +
              " >= " + fmt(kTgrlTiger, 2) + " (5 seeds pooled)"};
}

Verdict memory_and_lava(Runs& runs) {
  const double memory =
      runs.get(run_name("memory", Algorithm::Tgrl, 0), base("memory", Algorithm::Tgrl, 0, kMemoryIterations))
          .final_success;
  RunConfig lava = base("lava_crossing", Algorithm::Tgrl, 0, kLavaIterations);
  const double lava_success = runs.get(run_name("lava_crossing", Algorithm::Tgrl, 0, "_lam9"), lava).final_success;
  const double il =
      runs.get(run_name("memory", Algorithm::Il, 0), base("memory", Algorithm::Il, 0, kMemoryIlIterations))
          .final_success;
  return {memory >= kTgrlMemoryLava && lava_success >= kTgrlMemoryLava && il <= kIlMemoryMax,
          "TGRL memory " + fmt(memory) + ", lava " + fmt(lava_success) + " (>= " + fmt(kTgrlMemoryLava, 2) +
              "); IL memory " + fmt(il) + " <= " + fmt(kIlMemoryMax, 2)};
}

Verdict suboptimal_teachers(Runs& runs) {
  std::string detail;
  bool pass = true;
  for (double target : {0.4, 0.8}) {
    RunConfig c = base("tiger_door", Algorithm::Tgrl, 0, kSuboptimalIterations);
    c.teacher_target_success = target;
    const double s =
        runs.get(run_name("tiger_door", Algorithm::Tgrl, 0, "_teacher" + fmt(target, 1)), c).final_success;
    pass = pass && s >= kSuboptimalMin;
    detail += (detail.empty() ? "" : ", ") + fmt(100 * target, 0) + "% teacher -> " + fmt(s);
  }
  return {pass, detail + " (>= " + fmt(kSuboptimalMin, 2) + ")"};
}

Verdict lambda_robustness(Runs& runs) {
  double lo = 1.0, hi = 0.0;
  std::string detail;
  for (double init : {1.0, 3.0, 9.0, 27.0}) {
    RunConfig c = base("lava_crossing", Algorithm::Tgrl, 0, kLavaIterations);
    c.lambda_init = init;
    const double s =
        runs.get(run_name("lava_crossing", Algorithm::Tgrl, 0, "_lam" + fmt(init, 0)), c).final_success;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    detail += (detail.empty() ? "" : " ") + fmt(init, 0) + ":" + fmt(s);
  }
  return {hi - lo <= kLambdaSpread,
          "finals " + detail + ", spread " + fmt(hi - lo) + " <= " + fmt(kLambdaSpread, 2)};
}

Verdict fixed_vs_adaptive(Runs& runs) {
  const double adaptive = runs.get(run_name("tiger_door", Algorithm::Tgrl, 0),
                                   base("tiger_door", Algorithm::Tgrl, 0, kTigerIterations)).final_success;
  double best = 0.0;
  std::string detail;
  for (double coef : {0.1, 0.3, 1.0, 3.0}) {
    RunConfig c = base("tiger_door", Algorithm::Tgrl, 0, kTigerIterations);
    c.fixed_coefficient = coef;
    const double s = runs.get(run_name("tiger_door", Algorithm::Tgrl, 0, "_fixed" + fmt(coef, 1)), c).final_success;
    best = std::max(best, s);
    detail += (detail.empty() ? "" : " ") + fmt(coef, 1) + ":" + fmt(s);
  }
  return {adaptive >= best - kFixedSlack,
          "adaptive " + fmt(adaptive) + " vs fixed " + detail + " (best - " + fmt(kFixedSlack, 2) + ")"};
}

Verdict joint_vs_separate(Runs& runs) {
  auto median_iterations = [&](BufferMode mode, std::string& detail) {
    std::vector<int> its;
    for (auto seed : kSeeds) {
      RunConfig c = base("light_dark", Algorithm::Tgrl, seed, kLightDarkIterations);
      c.buffer_mode = mode;
      c.eval_every = kLightDarkEvalEvery;
      c.eval_episodes = 100;
      const Outcome& o = runs.get(run_name("light_dark", Algorithm::Tgrl, seed, "_" + to_string(mode)), c);
      int reached = kLightDarkIterations + 1;  // never reached
      for (const auto& row : o.rows)
        if (row.success_rate_pi_r && *row.success_rate_pi_r >= kLightDarkThreshold) {
          reached = row.iteration + 1;
          break;
        }
      its.push_back(reached);
      detail += (detail.empty() ? "" : " ") + std::to_string(reached);
    }
    std::sort(its.begin(), its.end());
    return its[its.size() / 2];
  };
  std::string joint_detail, separate_detail;
  const int joint = median_iterations(BufferMode::Joint, joint_detail);
  const int separate = median_iterations(BufferMode::Separate, separate_detail);
  return {joint <= separate, "median iterations to pi_R success " + fmt(kLightDarkThreshold, 2) + ": joint " +
                                 std::to_string(joint) + " [" + joint_detail + "] <= separate " +
                                 std::to_string(separate) + " [" + separate_detail + "] (" +
                                 std::to_string(kLightDarkIterations + 1) + " = not reached)"};
}

Verdict dual_identity() {
  Rng rng(derive_seed(7, "acceptance.dual_identity"));
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<std::vector<StepValues>> trajs(1 + static_cast<std::size_t>(uniform_int(rng, 10)));
    for (auto& t : trajs) {
      t.resize(1 + static_cast<std::size_t>(uniform_int(rng, 100)));
      for (auto& s : t) s = {2.0 * uniform01(rng) - 1.0, -4.0 * uniform01(rng)};
    }
    const double alpha = 0.1 + 10.0 * uniform01(rng);
    const double lambda = 30.0 * uniform01(rng);
    const double eta = 2.0 * uniform01(rng) - 1.0;
    const double gamma = 0.5 + 0.5 * uniform01(rng);
    worst = std::max(worst, dual_identity_check(trajs, alpha, lambda, eta, gamma).residual());
  }
  return {worst < kDualResidual, "max residual " + fmt_sci(worst) + " < " + fmt_sci(kDualResidual) +
                                     " over 1000 trajectory sets"};
}

PolicyEvaluator tabular_evaluator(const Eigen::MatrixXd& q, const Eigen::MatrixXd& pi) {
  return [q, pi](const Eigen::MatrixXf& histories) {
    const auto states = q.rows();
    PolicyValues v{Eigen::MatrixXd(q.cols(), histories.cols()), Eigen::MatrixXd(q.cols(), histories.cols())};
    for (Eigen::Index i = 0; i < histories.cols(); ++i) {
      Eigen::Index s = 0;
      histories.col(i).tail(states).maxCoeff(&s);
      v.q.col(i) = q.row(s).transpose();
      v.probs.col(i) = pi.row(s).transpose();
    }
    return v;
  };
}

Verdict perf_diff_oracle() {
  Rng rng(derive_seed(8, "acceptance.perf_diff"));
  const double gamma = 0.9;
  double worst = 0.0;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const TabularMdp m = random_mdp(5, 3, 0.1, rng);
    const Eigen::MatrixXd pi = random_policy(5, 3, rng);
    const Eigen::MatrixXd pi_r = random_policy(5, 3, rng);
    const double exact = exact_return(m, pi, gamma) - exact_return(m, pi_r, gamma);
    ReplayBuffer buf(200000, BufferMode::Joint, 1, 5, 3);
    for (int e = 0; buf.size() < 100000; ++e) {
      const bool main = e % 2 == 0;
      buf.push_trajectory(
          sample_episode(m, main ? pi : pi_r, main ? Collector::MainPolicy : Collector::AuxPolicy, rng));
    }
    const double est = estimate_perf_diff_replay(buf, tabular_evaluator(exact_q(m, pi, gamma), pi),
                                                 tabular_evaluator(exact_q(m, pi_r, gamma), pi_r), gamma,
                                                 0, nullptr)
                           .value;
    worst = std::max(worst, std::abs(est - exact));
    detail += (detail.empty() ? "" : ", ") + fmt(est, 4) + " vs " + fmt(exact, 4);
  }
  return {worst < kPerfDiffTolerance,
          "estimate vs exact " + detail + "; max error " + fmt(worst, 4) + " < " + fmt(kPerfDiffTolerance, 2)};
}

Verdict shaping_invariance() {
  Rng rng(derive_seed(9, "acceptance.pbrs"));
  const double gamma = 0.9;
  int mismatches = 0;
  for (int k = 0; k < 20; ++k) {
    const TabularMdp m = random_mdp(6, 3, 0.1, rng);
    Eigen::VectorXd phi(6);
    for (int s = 0; s < 6; ++s) phi[s] = 20.0 * uniform01(rng) - 10.0;
    Eigen::VectorXd shaped(m.reward.size());
    for (int s = 0; s < 6; ++s)
      for (int a = 0; a < 3; ++a) {
        const int r = m.row(s, a);
        double e = (1.0 - m.transition.row(r).sum()) * shaped_reward(m.reward[r], phi[s], 0.0, true, gamma);
        for (int s2 = 0; s2 < 6; ++s2)
          e += m.transition(r, s2) * shaped_reward(m.reward[r], phi[s], phi[s2], false, gamma);
        shaped[r] = e;
      }
    const Eigen::MatrixXd q = value_iteration(m, gamma);
    const Eigen::MatrixXd qs = value_iteration(m, gamma, &shaped);
    for (int s = 0; s < 6; ++s) {
      Eigen::Index a = 0, b = 0;
      q.row(s).maxCoeff(&a);
      qs.row(s).maxCoeff(&b);
      if (a != b) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " greedy-action mismatches over 20 MDPs x 6 states"};
}

Verdict gradient_checks() {
  Rng rng(derive_seed(10, "acceptance.gradients"));
  const int tiger_in = HistoryWindow::encoded_size(8, 20, 4);
  const std::vector<std::vector<int>> shapes = {{5, 3}, {6, 8, 4}, {12, 32, 16, 5}, {tiger_in, 128, 128, 4}};
  double worst = 0.0;
  for (const auto& shape : shapes) {
    Mlp<double> net(shape, rng);
    const int n = 8;
    Eigen::MatrixXd x(shape.front(), n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * uniform01(rng) - 1.0;
    std::vector<int> actions;
    Eigen::VectorXd y(n);
    Eigen::MatrixXd t(shape.back(), n);
    for (int i = 0; i < n; ++i) {
      actions.push_back(uniform_int(rng, shape.back()));
      y[i] = 2.0 * uniform01(rng) - 1.0;
      for (int a = 0; a < shape.back(); ++a) t(a, i) = 0.05 + uniform01(rng);
    }
    t.array().rowwise() /= t.colwise().sum().array();
    const LossFn mse = [&](const Mlp<double>& m, Params<double>* g) {
      return selected_mse_loss<double>(m, x, actions, y, g);
    };
    const LossFn ce = [&](const Mlp<double>& m, Params<double>* g) {
      return softmax_cross_entropy_loss<double>(m, x, t, g);
    };
    worst = std::max(worst, max_relative_gradient_error(net, mse, 20, rng));
    worst = std::max(worst, max_relative_gradient_error(net, ce, 20, rng));
  }
  return {worst < kGradientTolerance, "max relative error " + fmt_sci(worst) + " < " +
                                          fmt_sci(kGradientTolerance) + " (4 shapes x 2 losses x 20 probes)"};
}

Verdict lambda_mechanics(Runs& runs) {
  // Every dual-learner run trained so far, plus one of our own.
  const RunConfig c = base("tiger_door", Algorithm::Tgrl, 0, kTigerIterations);
  runs.get(run_name("tiger_door", Algorithm::Tgrl, 0), c);
  int checked_rows = 0, bad_rows = 0;
  for (const auto& [name, o] : runs.all()) {
    for (const auto& row : o.rows) {
      if (!row.lambda) continue;
      ++checked_rows;
      const double coef = *row.effective_coef;
      if (*row.lambda < 0.0 || !(coef > 0.0) || coef > c.alpha + 1e-12) ++bad_rows;
    }
  }
  Rng rng(derive_seed(11, "acceptance.lambda"));
  int sign_violations = 0;
  for (int k = 0; k < 10000; ++k) {
    DualState s;
    s.alpha = 0.1 + 10.0 * uniform01(rng);
    s.lambda = uniform01(rng) < 0.1 ? 0.0 : 30.0 * uniform01(rng);
    s.mu = 1e-4 + 0.1 * uniform01(rng);
    s.normalizer_updates = uniform_int(rng, 100);
    s.diff_normalizer = s.normalizer_updates ? 3.0 * uniform01(rng) : 0.0;
    const double diff = 4.0 * uniform01(rng) - 2.0;
    const DualState n = update_lambda(s, {diff, PerfDiffMethod::ReplayAdvantage, 1});
    const bool ok = n.lambda >= 0.0 && (diff <= 0.0 || n.lambda <= s.lambda) &&
                    (diff >= 0.0 || n.lambda >= s.lambda);
    if (!ok) ++sign_violations;
  }
  return {checked_rows > 0 && bad_rows == 0 && sign_violations == 0,
          std::to_string(bad_rows) + " bad rows of " + std::to_string(checked_rows) + "; " +
              std::to_string(sign_violations) + " sign violations over 10000 random states"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string out_dir = "acceptance_runs";
  app.add_option("--only", only, "Criteria to run")->delimiter(',')->check(CLI::Range(1, 11));
  app.add_option("--out", out_dir, "Directory for per-run CSV files");
  CLI11_PARSE(app, argc, argv);

  Runs runs(out_dir);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"imitation gap on tiger door", [&] { return imitation_gap(runs); }},
      {"memory and lava crossing", [&] { return memory_and_lava(runs); }},
      {"sub-optimal teachers", [&] { return suboptimal_teachers(runs); }},
      {"robustness to initial lambda", [&] { return lambda_robustness(runs); }},
      {"fixed vs adaptive coefficient", [&] { return fixed_vs_adaptive(runs); }},
      {"joint vs separate replay", [&] { return joint_vs_separate(runs); }},
      {"dual identity", [] { return dual_identity(); }},
      {"performance-difference oracle", [] { return perf_diff_oracle(); }},
      {"shaping invariance", [] { return shaping_invariance(); }},
      {"gradient checks", [] { return gradient_checks(); }},
      {"lambda mechanics", [&] { return lambda_mechanics(runs); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    std::cerr << "criterion " << id << ": " << criteria[i].first << '\n';
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
