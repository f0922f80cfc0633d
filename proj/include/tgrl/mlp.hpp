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

// Fully connected networks over encoded history windows.
//
// Batches are column-major: one sample per column, so a forward pass over a
// batch is a chain of GEMMs. Hidden layers use a rectifier, the output layer
// is linear. Everything is templated on the scalar: training runs in float,
// gradient checks in double.

#ifndef TGRL_MLP_HPP
#define TGRL_MLP_HPP

#include "tgrl/random.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgrl {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weight;  // out x in
  VectorX<Scalar> bias;    // out
};

/// Parameters (or gradients, or optimizer moments) of a whole network.
template <typename Scalar>
using Params = std::vector<DenseLayer<Scalar>>;

template <typename Scalar>
class Mlp {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  /// Layer inputs recorded by a forward pass; inputs[l] feeds layer l.
  struct Cache {
    std::vector<Matrix> inputs;
  };

  Mlp() = default;

  /// He-uniform hidden layers, small uniform output layer, zero biases.
  Mlp(std::vector<int> sizes, Rng& rng) : Mlp(zeros(std::move(sizes))) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      auto& w = layers_[l].weight;
      const bool output = l + 1 == layers_.size();
      const double fan_in = static_cast<double>(w.cols());
      const double bound = output ? 1.0 / std::sqrt(fan_in) : std::sqrt(6.0 / fan_in);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          w(i, j) = static_cast<Scalar>(bound * (2.0 * uniform01(rng) - 1.0));
    }
  }

  static Mlp zeros(std::vector<int> sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int s : sizes)
      if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
    Mlp net;
    net.sizes_ = std::move(sizes);
    for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l)
      net.layers_.push_back({Matrix::Zero(net.sizes_[l + 1], net.sizes_[l]),
                             Vector::Zero(net.sizes_[l + 1])});
    return net;
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Params<Scalar>& params() { return layers_; }
  const Params<Scalar>& params() const { return layers_; }

  Matrix forward(const Eigen::Ref<const Matrix>& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Matrix z = layers_[l].weight * a;
      z.colwise() += layers_[l].bias;
      if (l + 1 < layers_.size()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  Matrix forward(const Eigen::Ref<const Matrix>& x, Cache& cache) const {
    check_input(x);
    cache.inputs.resize(layers_.size());
    cache.inputs[0] = x;
    Matrix z;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      z = layers_[l].weight * cache.inputs[l];
      z.colwise() += layers_[l].bias;
      if (l + 1 < layers_.size()) cache.inputs[l + 1] = z.cwiseMax(Scalar(0));
    }
    return z;
  }

  /// Gradients of sum_over_batch <output_grad, output> with respect to every
  /// parameter, using the inputs recorded by forward(x, cache).
  Params<Scalar> backward(const Cache& cache, const Matrix& output_grad) const {
    if (cache.inputs.size() != layers_.size())
      throw std::invalid_argument("Mlp::backward: cache does not match network");
    if (output_grad.rows() != output_size() || output_grad.cols() != cache.inputs[0].cols())
      throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
    Params<Scalar> grads(layers_.size());
    Matrix delta = output_grad;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      grads[l].weight.noalias() = delta * cache.inputs[l].transpose();
      grads[l].bias = delta.rowwise().sum();
      if (l == 0) break;
      Matrix upstream = layers_[l].weight.transpose() * delta;
      delta = upstream.cwiseProduct(
          (cache.inputs[l].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
    return grads;
  }

 private:
  void check_input(const Eigen::Ref<const Matrix>& x) const {
    if (layers_.empty()) throw std::logic_error("Mlp: empty network");
    if (x.rows() != input_size())
      throw std::invalid_argument("Mlp::forward: input has " + std::to_string(x.rows()) +
                                  " rows, expected " + std::to_string(input_size()));
  }

  std::vector<int> sizes_;
  Params<Scalar> layers_;
};

template <typename Scalar>
bool same_shape(const Params<Scalar>& a, const Params<Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].weight.rows() != b[l].weight.rows() || a[l].weight.cols() != b[l].weight.cols() ||
        a[l].bias.size() != b[l].bias.size())
      return false;
  }
  return true;
}

template <typename Scalar>
bool all_finite(const Params<Scalar>& p) {
  for (const auto& layer : p)
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  return true;
}

template <typename Scalar>
Params<Scalar> zeros_like(const Params<Scalar>& p) {
  Params<Scalar> z(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    z[l].weight = MatrixX<Scalar>::Zero(p[l].weight.rows(), p[l].weight.cols());
    z[l].bias = VectorX<Scalar>::Zero(p[l].bias.size());
  }
  return z;
}

/// Squared Euclidean distance between two parameter sets.
template <typename Scalar>
double squared_distance(const Params<Scalar>& a, const Params<Scalar>& b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    d += static_cast<double>((a[l].weight - b[l].weight).squaredNorm());
    d += static_cast<double>((a[l].bias - b[l].bias).squaredNorm());
  }
  return d;
}

/// Mean over samples of (Q(x_i)[a_i] - y_i)^2. Writes parameter gradients
/// to `grads` when given.
template <typename Scalar>
double selected_mse_loss(const Mlp<Scalar>& net, const Eigen::Ref<const MatrixX<Scalar>>& x,
                         const std::vector<int>& actions, const Eigen::Ref<const VectorX<Scalar>>& targets,
                         Params<Scalar>* grads = nullptr) {
  const auto n = x.cols();
  if (static_cast<Eigen::Index>(actions.size()) != n || targets.size() != n)
    throw std::invalid_argument("selected_mse_loss: batch size mismatch");
  typename Mlp<Scalar>::Cache cache;
  const MatrixX<Scalar> q = grads ? net.forward(x, cache) : net.forward(x);
  MatrixX<Scalar> g = MatrixX<Scalar>::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= q.rows()) throw std::out_of_range("selected_mse_loss: action out of range");
    const Scalar e = q(a, i) - targets[i];
    loss += static_cast<double>(e) * static_cast<double>(e);
    g(a, i) = Scalar(2) * e / static_cast<Scalar>(n);
  }
  loss /= static_cast<double>(n);
  if (grads) *grads = net.backward(cache, g);
  return loss;
}

/// Mean over samples of the cross-entropy between target distributions (one
/// per column) and softmax(net(x)).
template <typename Scalar>
double softmax_cross_entropy_loss(const Mlp<Scalar>& net, const Eigen::Ref<const MatrixX<Scalar>>& x,
                                  const Eigen::Ref<const MatrixX<Scalar>>& target_probs,
                                  Params<Scalar>* grads = nullptr) {
  const auto n = x.cols();
  if (target_probs.cols() != n || target_probs.rows() != net.output_size())
    throw std::invalid_argument("softmax_cross_entropy_loss: target shape mismatch");
  typename Mlp<Scalar>::Cache cache;
  MatrixX<Scalar> z = grads ? net.forward(x, cache) : net.forward(x);
  z.rowwise() -= z.colwise().maxCoeff();
  const RowVectorX<Scalar> log_norm = z.array().exp().colwise().sum().log().matrix();
  MatrixX<Scalar> log_p = z;
  log_p.rowwise() -= log_norm;
  const double loss = -static_cast<double>(target_probs.cwiseProduct(log_p).sum()) / static_cast<double>(n);
  if (grads) {
    const MatrixX<Scalar> p = log_p.array().exp().matrix();
    // d/dz of -sum t log softmax(z) is softmax(z) * sum(t) - t.
    MatrixX<Scalar> g = p * target_probs.colwise().sum().asDiagonal();
    g -= target_probs;
    *grads = net.backward(cache, g / static_cast<Scalar>(n));
  }
  return loss;
}

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  AdamConfig config;
  Params<Scalar> first_moment;
  Params<Scalar> second_moment;
  long step = 0;

  AdamState() = default;
  AdamState(const Mlp<Scalar>& net, AdamConfig cfg)
      : config(cfg), first_moment(zeros_like(net.params())), second_moment(zeros_like(net.params())) {}
};

/// Bias-corrected Adam. Throws std::domain_error on non-finite gradients and
/// leaves the network untouched in that case.
template <typename Scalar>
void adam_step(Mlp<Scalar>& net, const Params<Scalar>& grads, AdamState<Scalar>& state) {
  if (!same_shape(net.params(), grads) || !same_shape(net.params(), state.first_moment))
    throw std::invalid_argument("adam_step: shape mismatch");
  if (!all_finite(grads)) throw std::domain_error("adam_step: non-finite gradient");
  const auto& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const auto b1 = static_cast<Scalar>(c.beta1);
  const auto b2 = static_cast<Scalar>(c.beta2);
  const auto step_size = static_cast<Scalar>(c.learning_rate / bc1);
  const auto inv_sqrt_bc2 = static_cast<Scalar>(1.0 / std::sqrt(bc2));
  const auto eps = static_cast<Scalar>(c.epsilon);
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
    param.array() -= step_size * m.array() / (v.array().sqrt() * inv_sqrt_bc2 + eps);
  };
  auto& layers = net.params();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, grads[l].weight, state.first_moment[l].weight,
           state.second_moment[l].weight);
    update(layers[l].bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
  }
}

/// shadow <- (1 - tau) * shadow + tau * online, elementwise.
template <typename Scalar>
void soft_update(Mlp<Scalar>& shadow, const Mlp<Scalar>& online, double tau) {
  if (!same_shape(shadow.params(), online.params()))
    throw std::invalid_argument("soft_update: shape mismatch");
  const auto keep = static_cast<Scalar>(1.0 - tau);
  const auto take = static_cast<Scalar>(tau);
  auto& dst = shadow.params();
  const auto& src = online.params();
  for (std::size_t l = 0; l < dst.size(); ++l) {
    dst[l].weight = keep * dst[l].weight + take * src[l].weight;
    dst[l].bias = keep * dst[l].bias + take * src[l].bias;
  }
}

/// An online network with its slowly tracking target copy.
template <typename Scalar>
struct TargetCopy {
  Mlp<Scalar> shadow;
  double tau = 0.005;

  TargetCopy() = default;
  TargetCopy(const Mlp<Scalar>& online, double rate) : shadow(online), tau(rate) {}
  void update(const Mlp<Scalar>& online) { soft_update(shadow, online, tau); }
};

// ----------------------------------------------------------------------------
// Checkpoint format (all integers u64, all reals f64, little-endian):
//   magic "TGRLNET1" (8 bytes) | net count N
//   N times: layer-size count K | K sizes | for each layer: weight in
//            row-major order (out x in), then bias (out).

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <typename T>
T read_le(std::istream& is) {
  std::uint64_t bits = 0;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) throw std::runtime_error("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

inline constexpr char kCheckpointMagic[8] = {'T', 'G', 'R', 'L', 'N', 'E', 'T', '1'};

}  // namespace detail

template <typename Scalar>
void save_networks(const std::string& path, const std::vector<const Mlp<Scalar>*>& nets) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  os.write(detail::kCheckpointMagic, 8);
  detail::write_le<std::uint64_t>(os, nets.size());
  for (const Mlp<Scalar>* net : nets) {
    detail::write_le<std::uint64_t>(os, net->sizes().size());
    for (int s : net->sizes()) detail::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(s));
    for (const auto& layer : net->params()) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
          detail::write_le<double>(os, static_cast<double>(layer.weight(i, j)));
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
        detail::write_le<double>(os, static_cast<double>(layer.bias[i]));
    }
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

template <typename Scalar>
std::vector<Mlp<Scalar>> load_networks(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, detail::kCheckpointMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const auto count = detail::read_le<std::uint64_t>(is);
  if (count > 64) throw std::runtime_error("checkpoint: implausible network count");
  std::vector<Mlp<Scalar>> nets;
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto k = detail::read_le<std::uint64_t>(is);
    if (k < 2 || k > 64) throw std::runtime_error("checkpoint: implausible layer count");
    std::vector<int> sizes;
    for (std::uint64_t i = 0; i < k; ++i) {
      const auto s = detail::read_le<std::uint64_t>(is);
      if (s < 1 || s > (1u << 24)) throw std::runtime_error("checkpoint: implausible layer size");
      sizes.push_back(static_cast<int>(s));
    }
    auto net = Mlp<Scalar>::zeros(sizes);
    for (auto& layer : net.params()) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
          layer.weight(i, j) = static_cast<Scalar>(detail::read_le<double>(is));
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
        layer.bias[i] = static_cast<Scalar>(detail::read_le<double>(is));
    }
    nets.push_back(std::move(net));
  }
  return nets;
}

}  // namespace tgrl

#endif  // TGRL_MLP_HPP
