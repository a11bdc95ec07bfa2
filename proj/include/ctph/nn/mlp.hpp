#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <vector>

namespace ctph {

enum class Activation : int { linear = 0, relu = 1, tanh = 2 };

/// Dense multilayer perceptron over a configurable scalar type. Training runs
/// in single precision (the batch GEMMs dominate the step budget); gradient
/// verification instantiates the same code in double precision.
///
/// Batch convention: matrices hold one sample per column, so a forward pass
/// over inputs X (in x B) is Z_l = W_l A_{l-1} + b_l, A_l = act(Z_l).
template <typename Scalar>
struct Mlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
    Activation activation = Activation::linear;
  };

  std::vector<Layer> layers;

  /// Builds a net with uniform fan-in initialization: every weight and bias
  /// of layer l drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Mlp make(const std::vector<int>& sizes,
                  const std::vector<Activation>& activations,
                  std::mt19937_64& rng) {
    if (sizes.size() < 2 || activations.size() != sizes.size() - 1) {
      throw std::invalid_argument("Mlp::make: sizes/activations mismatch");
    }
    Mlp net;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
      Layer layer;
      const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      layer.weight.resize(sizes[l + 1], sizes[l]);
      layer.bias.resize(sizes[l + 1]);
      for (int i = 0; i < layer.weight.rows(); ++i) {
        for (int j = 0; j < layer.weight.cols(); ++j) {
          layer.weight(i, j) = static_cast<Scalar>(u(rng));
        }
      }
      for (int i = 0; i < layer.bias.size(); ++i) {
        layer.bias(i) = static_cast<Scalar>(u(rng));
      }
      layer.activation = activations[l];
      net.layers.push_back(std::move(layer));
    }
    return net;
  }

  int input_size() const { return static_cast<int>(layers.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers.back().weight.rows()); }

  bool same_architecture(const Mlp& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (size_t l = 0; l < layers.size(); ++l) {
      if (layers[l].weight.rows() != other.layers[l].weight.rows() ||
          layers[l].weight.cols() != other.layers[l].weight.cols() ||
          layers[l].activation != other.layers[l].activation) {
        return false;
      }
    }
    return true;
  }
};

/// Forward cache: activated outputs per layer (a[0] is the input batch).
/// Buffers are reused across calls, so steady-state passes allocate nothing.
template <typename Scalar>
struct MlpCache {
  std::vector<typename Mlp<Scalar>::Matrix> a;
};

/// Parameter gradients mirroring the network's layer shapes.
template <typename Scalar>
struct MlpGradients {
  std::vector<typename Mlp<Scalar>::Matrix> dw;
  std::vector<typename Mlp<Scalar>::Vector> db;

  void match(const Mlp<Scalar>& net) {
    dw.resize(net.layers.size());
    db.resize(net.layers.size());
    for (size_t l = 0; l < net.layers.size(); ++l) {
      dw[l].resizeLike(net.layers[l].weight);
      db[l].resizeLike(net.layers[l].bias);
    }
  }

  bool finite() const {
    for (const auto& m : dw) {
      if (!m.allFinite()) return false;
    }
    for (const auto& v : db) {
      if (!v.allFinite()) return false;
    }
    return true;
  }
};

namespace detail {

template <typename Scalar, typename Matrix>
void apply_activation(Activation act, Matrix& z) {
  switch (act) {
    case Activation::linear:
      break;
    case Activation::relu:
      z = z.array().max(Scalar(0)).matrix();
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
  }
}

// Derivative expressed through the *activated* value a = act(z):
// relu' = [a > 0], tanh' = 1 - a^2, linear' = 1.
template <typename Scalar, typename Matrix>
void scale_by_activation_grad(Activation act, const Matrix& a, Matrix& delta) {
  switch (act) {
    case Activation::linear:
      break;
    case Activation::relu:
      delta.array() *= (a.array() > Scalar(0)).template cast<Scalar>();
      break;
    case Activation::tanh:
      delta.array() *= (Scalar(1) - a.array().square());
      break;
  }
}

}  // namespace detail

/// Batch forward pass; returns a reference to the cached output (out x B).
template <typename Scalar>
const typename Mlp<Scalar>::Matrix& forward(
    const Mlp<Scalar>& net, const typename Mlp<Scalar>::Matrix& input,
    MlpCache<Scalar>& cache) {
  if (input.rows() != net.input_size()) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  cache.a.resize(net.layers.size() + 1);
  cache.a[0] = input;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    auto& out = cache.a[l + 1];
    out.noalias() = layer.weight * cache.a[l];
    out.colwise() += layer.bias;
    detail::apply_activation<Scalar>(layer.activation, out);
  }
  return cache.a.back();
}

/// Single-vector convenience forward.
template <typename Scalar>
typename Mlp<Scalar>::Vector forward(const Mlp<Scalar>& net,
                                     const typename Mlp<Scalar>::Vector& x) {
  MlpCache<Scalar> cache;
  return forward(net, typename Mlp<Scalar>::Matrix(x), cache);
}

/// Reverse-mode pass for the batch held in `cache`. `upstream` is dL/d(out)
/// with the same shape as the forward output. Fills `grads` and, when
/// `input_grad` is non-null, dL/d(input).
template <typename Scalar>
void backward(const Mlp<Scalar>& net, const MlpCache<Scalar>& cache,
              const typename Mlp<Scalar>::Matrix& upstream,
              MlpGradients<Scalar>& grads,
              typename Mlp<Scalar>::Matrix* input_grad = nullptr) {
  if (cache.a.size() != net.layers.size() + 1) {
    throw std::logic_error("backward: forward cache missing");
  }
  grads.match(net);
  typename Mlp<Scalar>::Matrix delta = upstream;
  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const auto& layer = net.layers[l];
    detail::scale_by_activation_grad<Scalar>(layer.activation, cache.a[l + 1],
                                             delta);
    grads.dw[l].noalias() = delta * cache.a[l].transpose();
    grads.db[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (layer.weight.transpose() * delta).eval();
    } else if (input_grad) {
      input_grad->noalias() = layer.weight.transpose() * delta;
    }
  }
}

}  // namespace ctph
