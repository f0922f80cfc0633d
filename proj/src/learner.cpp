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

#include "tgrl/learner.hpp"

#include "tgrl/baselines.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tgrl {

namespace {

constexpr std::size_t kRecentReturns = 10;

Eigen::VectorXf expected_under(const Eigen::MatrixXf& q, const Eigen::MatrixXd& probs) {
  return (q.cast<double>().cwiseProduct(probs)).colwise().sum().transpose().cast<float>();
}

double td_update(Mlp<float>& net, AdamState<float>& opt, const Eigen::MatrixXf& x,
                 const std::vector<int>& actions, const Eigen::VectorXf& targets) {
  Params<float> grads;
  const double loss = selected_mse_loss<float>(net, x, actions, targets, &grads);
  if (!std::isfinite(loss)) throw std::domain_error("non-finite TD loss");
  adam_step(net, grads, opt);
  return loss;
}

DualState initial_dual(const RunConfig& c) {
  DualState d = c.fixed_coefficient ? DualState::fixed(c.alpha, *c.fixed_coefficient) : DualState{};
  d.alpha = c.alpha;
  if (!c.fixed_coefficient) d.lambda = c.lambda_init;
  d.mu = c.mu;
  return d;
}

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Mlp<float> init_net(const std::vector<int>& sizes, std::uint64_t seed, std::string_view label) {
  Rng rng = make_rng(seed, label);
  return Mlp<float>(sizes, rng);
}

void push_recent(std::deque<double>& d, double v) {
  d.push_back(v);
  if (d.size() > kRecentReturns) d.pop_front();
}

double mean(const std::deque<double>& d) {
  return d.empty() ? 0.0 : std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

}  // namespace

// ---------------------------------------------------------------- snapshot

PolicySnapshot::PolicySnapshot(std::vector<Mlp<float>> nets, std::vector<double> weights,
                               double temperature, int window, int obs_dim, int num_actions)
    : nets_(std::move(nets)),
      weights_(std::move(weights)),
      temperature_(temperature),
      window_(window),
      obs_dim_(obs_dim),
      num_actions_(num_actions) {
  if (nets_.empty() || nets_.size() != weights_.size())
    throw std::invalid_argument("PolicySnapshot: need one weight per network");
  const int in = HistoryWindow::encoded_size(window, obs_dim, num_actions);
  for (const auto& n : nets_)
    if (n.input_size() != in || n.output_size() != num_actions)
      throw std::invalid_argument("PolicySnapshot: network shape does not match the window encoding");
  if (!(temperature > 0.0)) throw std::invalid_argument("PolicySnapshot: temperature must be positive");
}

Eigen::MatrixXd PolicySnapshot::q_values(const Eigen::MatrixXf& histories) const {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(num_actions_, histories.cols());
  for (std::size_t i = 0; i < nets_.size(); ++i) q += weights_[i] * nets_[i].forward(histories).cast<double>();
  return q;
}

Eigen::VectorXd PolicySnapshot::q_values(const Eigen::VectorXf& history) const {
  return q_values(Eigen::MatrixXf(history)).col(0);
}

Eigen::VectorXd PolicySnapshot::action_probs(const Eigen::VectorXf& history) const {
  return softmax_columns(q_values(history), temperature_).col(0);
}

PolicyValues PolicySnapshot::values(const Eigen::MatrixXf& histories) const {
  PolicyValues v;
  v.q = q_values(histories);
  v.probs = softmax_columns(v.q, temperature_);
  return v;
}

int PolicySnapshot::greedy(const Eigen::VectorXf& history) const {
  return greedy_action(q_values(history));
}

EvalResult evaluate(const PolicySnapshot& policy, const Environment& env, int episodes,
                    std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be at least 1");
  const auto& spec = env.spec();
  if (spec.student_obs_dim != policy.obs_dim() || spec.num_actions != policy.num_actions())
    throw std::invalid_argument("evaluate: policy does not match environment " + spec.name);
  auto sim = env.clone();
  EvalResult result;
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Transition tr = sim->reset(derive_seed(seed, "eval", static_cast<std::uint64_t>(e)));
    HistoryWindow w(policy.window(), policy.obs_dim(), policy.num_actions());
    w.reset(tr.student_obs);
    double ret = 0.0;
    while (!tr.done) {
      const int a = policy.greedy(w.encode());
      tr = sim->step(a);
      w.push(tr.student_obs, a);
      ret += tr.reward;
    }
    ++result.episodes;
    if (tr.outcome == Outcome::Success) ++result.successes;
    total += ret;
  }
  result.mean_return = total / episodes;
  return result;
}

// ---------------------------------------------------------------- factories

std::unique_ptr<NavigableEnvironment> make_env(const RunConfig& config) {
  if (config.env == "lava_crossing") return make_lava_crossing(config.lava_rivers);
  return make_env(std::string_view(config.env));
}

std::shared_ptr<const TeacherPolicy> make_teacher(const RunConfig& config,
                                                  const NavigableEnvironment& env) {
  auto base = shortest_path_teacher(env, config.eps_smooth);
  if (config.teacher_target_success >= 1.0) return base;
  return calibrate_suboptimal(base, config.teacher_target_success, env,
                              derive_seed(config.seed, "teacher.calibration"))
      .teacher;
}

// ---------------------------------------------------------------- learner

Learner::Learner(RunConfig config) : Learner(std::move(config), nullptr, nullptr) {}

Learner::Learner(RunConfig config, std::shared_ptr<const NavigableEnvironment> env,
                 std::shared_ptr<const TeacherPolicy> teacher)
    : config_((config.validate(), std::move(config))),
      env_(env ? std::move(env) : std::shared_ptr<const NavigableEnvironment>(make_env(config_))),
      teacher_(teacher ? std::move(teacher) : make_teacher(config_, *env_)),
      sim_(env_->clone()),
      obs_dim_(env_->spec().student_obs_dim),
      num_actions_(env_->spec().num_actions),
      buffer_(config_.buffer_capacity, config_.buffer_mode, config_.window, obs_dim_, num_actions_),
      dual_(initial_dual(config_)),
      cosil_alpha_(config_.cosil_alpha_init),
      collect_rng_(make_rng(config_.seed, "train.collect")),
      update_rng_(make_rng(config_.seed, "train.update")),
      diff_rng_(make_rng(config_.seed, "train.perf_diff")) {
  if (teacher_->num_actions() != num_actions_)
    throw std::invalid_argument("Learner: teacher and environment disagree on the action count");
  const int in = HistoryWindow::encoded_size(config_.window, obs_dim_, num_actions_);
  const auto q_sizes = layer_sizes(in, config_.hidden, num_actions_);
  q_r_ = init_net(q_sizes, config_.seed, "init.q_r");
  q_e_ = init_net(q_sizes, config_.seed, "init.q_e");
  q_aux_ = init_net(q_sizes, config_.seed, "init.q_aux");
  imitation_ = init_net(q_sizes, config_.seed, "init.imitation");
  value_ = init_net(layer_sizes(in, config_.hidden, 1), config_.seed, "init.value");
  q_r_target_ = TargetCopy<float>(q_r_, config_.tau);
  q_e_target_ = TargetCopy<float>(q_e_, config_.tau);
  q_aux_target_ = TargetCopy<float>(q_aux_, config_.tau);
  const AdamConfig adam{config_.lr};
  q_r_opt_ = AdamState<float>(q_r_, adam);
  q_e_opt_ = AdamState<float>(q_e_, adam);
  q_aux_opt_ = AdamState<float>(q_aux_, adam);
  imitation_opt_ = AdamState<float>(imitation_, adam);
  value_opt_ = AdamState<float>(value_, adam);
  if (config_.algorithm == Algorithm::Pbrs) pbrs_stage_ = 1;
}

std::pair<double, double> Learner::main_weights() const {
  switch (config_.algorithm) {
    case Algorithm::Tgrl: return {1.0, dual_.effective_coefficient()};
    case Algorithm::Cosil: return {1.0, cosil_alpha_};
    case Algorithm::Il: return {0.0, 1.0};
    case Algorithm::Pbrs: return pbrs_stage_ == 1 ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
    case Algorithm::Advisor:
    case Algorithm::RlOnly: return {1.0, 0.0};
  }
  return {1.0, 0.0};
}

PolicyValues Learner::main_values(const Eigen::MatrixXf& histories) const {
  const auto [w_r, w_e] = main_weights();
  PolicyValues v;
  v.q = Eigen::MatrixXd::Zero(num_actions_, histories.cols());
  if (w_r != 0.0) v.q += w_r * q_r_.forward(histories).cast<double>();
  if (w_e != 0.0) v.q += w_e * q_e_.forward(histories).cast<double>();
  v.probs = softmax_columns(v.q, config_.temperature);
  return v;
}

PolicyValues Learner::aux_values(const Eigen::MatrixXf& histories) const {
  PolicyValues v;
  v.q = q_aux_.forward(histories).cast<double>();
  v.probs = softmax_columns(v.q, config_.temperature);
  return v;
}

PolicySnapshot Learner::main_policy() const {
  const auto [w_r, w_e] = main_weights();
  std::vector<Mlp<float>> nets;
  std::vector<double> weights;
  if (w_r != 0.0) {
    nets.push_back(q_r_);
    weights.push_back(w_r);
  }
  if (w_e != 0.0 || nets.empty()) {
    nets.push_back(q_e_);
    weights.push_back(w_e);
  }
  return PolicySnapshot(std::move(nets), std::move(weights), config_.temperature, config_.window,
                        obs_dim_, num_actions_);
}

PolicySnapshot Learner::aux_policy() const {
  return PolicySnapshot({q_aux_}, {1.0}, config_.temperature, config_.window, obs_dim_, num_actions_);
}

Trajectory Learner::collect(Collector who) {
  Trajectory traj;
  traj.collector = who;
  traj.seed = derive_seed(config_.seed, "train.env", static_cast<std::uint64_t>(episodes_++));
  Transition tr = sim_->reset(traj.seed);
  HistoryWindow window(config_.window, obs_dim_, num_actions_);
  window.reset(tr.student_obs);
  auto append_obs = [&](const ObsVector& o) {
    traj.observations.insert(traj.observations.end(), o.data(), o.data() + o.size());
  };
  append_obs(tr.student_obs);
  double discounted = 0.0, discount = 1.0;
  while (!tr.done) {
    TrajectoryStep step;
    step.history = window.encode();
    const Eigen::MatrixXf h = step.history;
    const Eigen::VectorXd probs =
        (who == Collector::AuxPolicy ? aux_values(h) : main_values(h)).probs.col(0);
    step.action = uniform01(collect_rng_) < config_.epsilon_greedy
                      ? uniform_int(collect_rng_, num_actions_)
                      : sample_categorical(probs, collect_rng_);
    step.teacher_probs = teacher_->action_probs(tr.privileged_obs);
    step.imitation_reward = clipped_log(step.teacher_probs[step.action], config_.c_clip);
    tr = sim_->step(step.action);
    step.transition = tr;
    window.push(tr.student_obs, step.action);
    append_obs(tr.student_obs);
    traj.actions.push_back(step.action);
    discounted += discount * tr.reward;
    discount *= config_.gamma;
    traj.steps.push_back(std::move(step));
  }
  env_steps_ += static_cast<long>(traj.steps.size());
  buffer_.push_trajectory(traj);
  push_recent(who == Collector::AuxPolicy ? recent_aux_returns_ : recent_main_returns_, discounted);
  return traj;
}

Eigen::VectorXf Learner::shaped_rewards(const ReplayBatch& b) const {
  const Eigen::VectorXf v = value_.forward(b.histories).row(0).transpose();
  const Eigen::VectorXf v_next = value_.forward(b.next_histories).row(0).transpose();
  Eigen::VectorXf out(b.size());
  for (int i = 0; i < b.size(); ++i)
    out[i] = static_cast<float>(
        shaped_reward(b.rewards[i], v[i], v_next[i], b.done[i] > 0.5, config_.gamma));
  return out;
}

Learner::Losses Learner::update_step() {
  const auto& c = config_;
  const ReplayBatch b = buffer_.sample_batch(c.batch_size, update_rng_, Collector::MainPolicy);
  const Eigen::VectorXf live = (1.0 - b.done.array()).cast<float>().matrix();
  const auto g = static_cast<float>(c.gamma);
  const Eigen::VectorXf rewards = b.rewards.cast<float>();
  const Eigen::VectorXf imitation = b.imitation_rewards.cast<float>();
  Losses out;

  // Bootstrap one critic under the Boltzmann policy of `pi_q`.
  auto bootstrap = [&](const Eigen::VectorXf& r, const Eigen::MatrixXf& q_next,
                       const Eigen::MatrixXd& pi_next) -> Eigen::VectorXf {
    return r + g * live.cwiseProduct(expected_under(q_next, pi_next));
  };

  switch (c.algorithm) {
    case Algorithm::Tgrl:
    case Algorithm::Cosil: {
      const double coef = c.algorithm == Algorithm::Tgrl ? dual_.effective_coefficient() : cosil_alpha_;
      const Eigen::MatrixXf qr_next = q_r_target_.shadow.forward(b.next_histories);
      const Eigen::MatrixXf qe_next = q_e_target_.shadow.forward(b.next_histories);
      const Eigen::MatrixXd pi_next =
          softmax_columns((qr_next.cast<double>() + coef * qe_next.cast<double>()), c.temperature);
      out.q_r = td_update(q_r_, q_r_opt_, b.histories, b.actions, bootstrap(rewards, qr_next, pi_next));
      out.q_e = td_update(q_e_, q_e_opt_, b.histories, b.actions, bootstrap(imitation, qe_next, pi_next));
      q_r_target_.update(q_r_);
      q_e_target_.update(q_e_);
      if (c.algorithm == Algorithm::Tgrl) {
        const bool joint = c.buffer_mode == BufferMode::Joint;
        if (joint || buffer_.size_for(Collector::AuxPolicy) > 0) {
          const ReplayBatch ab =
              joint ? b : buffer_.sample_batch(c.batch_size, update_rng_, Collector::AuxPolicy);
          const Eigen::VectorXf a_live = (1.0 - ab.done.array()).cast<float>().matrix();
          const Eigen::MatrixXf qa_next = q_aux_target_.shadow.forward(ab.next_histories);
          const Eigen::MatrixXd pr_next = softmax_columns(qa_next.cast<double>(), c.temperature);
          const Eigen::VectorXf y =
              ab.rewards.cast<float>() + g * a_live.cwiseProduct(expected_under(qa_next, pr_next));
          td_update(q_aux_, q_aux_opt_, ab.histories, ab.actions, y);
          q_aux_target_.update(q_aux_);
        }
      }
      break;
    }
    case Algorithm::Il:
    case Algorithm::Pbrs:
      if (pbrs_stage_ != 2) {
        const Eigen::MatrixXf qe_next = q_e_target_.shadow.forward(b.next_histories);
        const Eigen::MatrixXd pi_next = softmax_columns(qe_next.cast<double>(), c.temperature);
        out.q_e = td_update(q_e_, q_e_opt_, b.histories, b.actions, bootstrap(imitation, qe_next, pi_next));
        q_e_target_.update(q_e_);
        break;
      }
      [[fallthrough]];
    case Algorithm::RlOnly:
    case Algorithm::Advisor: {
      Eigen::VectorXf r = rewards;
      if (pbrs_stage_ == 2) r = shaped_rewards(b);
      if (c.algorithm == Algorithm::Advisor) {
        const Eigen::MatrixXd aux = softmax_columns(imitation_.forward(b.histories).cast<double>(), 1.0);
        for (int i = 0; i < b.size(); ++i) {
          const double w = advisor_weight(c.advisor_beta, b.teacher_probs.col(i).cast<double>(), aux.col(i));
          r[i] = static_cast<float>((1.0 - w) * b.rewards[i] + w * b.imitation_rewards[i]);
        }
        Params<float> grads;
        out.q_e = softmax_cross_entropy_loss<float>(imitation_, b.histories, b.teacher_probs, &grads);
        if (!std::isfinite(out.q_e)) throw std::domain_error("non-finite imitation loss");
        adam_step(imitation_, grads, imitation_opt_);
      }
      const Eigen::MatrixXf qr_next = q_r_target_.shadow.forward(b.next_histories);
      const Eigen::MatrixXd pi_next = softmax_columns(qr_next.cast<double>(), c.temperature);
      out.q_r = td_update(q_r_, q_r_opt_, b.histories, b.actions, bootstrap(r, qr_next, pi_next));
      q_r_target_.update(q_r_);
      break;
    }
  }
  return out;
}

void Learner::fit_pbrs_value() {
  // Monte Carlo returns-to-go of the imitation policy's own rollouts.
  std::vector<Eigen::VectorXf> inputs;
  std::vector<float> targets;
  for (int e = 0; e < config_.pbrs_value_episodes; ++e) {
    const Trajectory traj = collect(Collector::MainPolicy);
    double ret = 0.0;
    const auto first = inputs.size();
    inputs.resize(first + traj.steps.size());
    targets.resize(first + traj.steps.size());
    for (std::size_t k = traj.steps.size(); k-- > 0;) {
      ret = traj.steps[k].transition.reward + config_.gamma * ret;
      inputs[first + k] = traj.steps[k].history;
      targets[first + k] = static_cast<float>(ret);
    }
  }
  if (inputs.empty()) return;
  const int n = static_cast<int>(inputs.size());
  const int in = value_.input_size();
  Rng rng = make_rng(config_.seed, "pbrs.value");
  Eigen::MatrixXf x(in, config_.batch_size);
  Eigen::VectorXf y(config_.batch_size);
  const std::vector<int> zero(static_cast<std::size_t>(config_.batch_size), 0);
  for (int step = 0; step < config_.pbrs_value_steps; ++step) {
    for (int i = 0; i < config_.batch_size; ++i) {
      const auto k = static_cast<std::size_t>(uniform_int(rng, n));
      x.col(i) = inputs[k];
      y[i] = targets[k];
    }
    td_update(value_, value_opt_, x, zero, y);
  }
}

PerfDiffEstimate Learner::estimate_perf_diff() {
  if (config_.perf_diff_method == PerfDiffMethod::MonteCarlo) {
    PerfDiffEstimate est;
    est.method = PerfDiffMethod::MonteCarlo;
    est.value = mean(recent_main_returns_) - mean(recent_aux_returns_);
    est.samples = static_cast<int>(recent_main_returns_.size() + recent_aux_returns_.size());
    return est;
  }
  const PolicyEvaluator main = [this](const Eigen::MatrixXf& h) {
    PolicyValues v = main_values(h);
    v.q = q_r_.forward(h).cast<double>();
    return v;
  };
  const PolicyEvaluator aux = [this](const Eigen::MatrixXf& h) {
    PolicyValues v = aux_values(h);
    if (config_.perf_diff_critic == PerfDiffCritic::Shared) v.q = q_r_.forward(h).cast<double>();
    return v;
  };
  return estimate_perf_diff_replay(buffer_, main, aux, config_.gamma, config_.perf_diff_batch,
                                   &diff_rng_);
}

IterationMetrics Learner::iterate() {
  if (pbrs_stage_ == 1 && iteration_ == config_.pbrs_il_iterations) {
    fit_pbrs_value();
    pbrs_stage_ = 2;
  }
  IterationMetrics m;
  const bool alternate = config_.algorithm == Algorithm::Tgrl;
  double cross_entropy = 0.0, j_e = 0.0;
  int main_steps = 0, main_episodes = 0;
  for (int k = 0; k < config_.n_collect; ++k) {
    const Collector who =
        alternate && (episodes_ % 2 == 1) ? Collector::AuxPolicy : Collector::MainPolicy;
    const Trajectory traj = collect(who);
    if (who != Collector::MainPolicy) continue;
    double discount = 1.0, discounted = 0.0;
    for (const auto& s : traj.steps) {
      cross_entropy -= s.imitation_reward;
      discounted += discount * s.imitation_reward;
      discount *= config_.gamma;
    }
    main_steps += static_cast<int>(traj.steps.size());
    j_e += discounted;
    ++main_episodes;
  }
  m.episodes = config_.n_collect;

  Losses total;
  for (int u = 0; u < config_.n_update; ++u) {
    const Losses l = update_step();
    total.q_r += l.q_r;
    total.q_e += l.q_e;
  }
  if (config_.n_update > 0) {
    m.q_r_loss = total.q_r / config_.n_update;
    m.q_e_loss = total.q_e / config_.n_update;
  }

  if (config_.algorithm == Algorithm::Tgrl) {
    const PerfDiffEstimate est = estimate_perf_diff();
    dual_ = update_lambda(dual_, est);
    m.perf_diff = est.value;
  } else if (config_.algorithm == Algorithm::Cosil && main_episodes > 0) {
    cosil_alpha_ = cosil_update_alpha({cosil_alpha_, config_.cosil_target, config_.cosil_lr},
                                      j_e / main_episodes)
                       .alpha;
  }
  m.mean_cross_entropy = main_steps ? cross_entropy / main_steps : 0.0;
  m.lambda = dual_.lambda;
  m.effective_coef = main_weights().second;
  m.iteration = iteration_++;
  m.env_steps = env_steps_;
  return m;
}

}  // namespace tgrl
