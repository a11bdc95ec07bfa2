#pragma once

#include <cmath>
#include <stdexcept>

#include "ctph/nn/mlp.hpp"

namespace ctph {

/// Piecewise learning-rate schedule: hold the initial rate for a number of
/// episodes, decay linearly over a second horizon, then hold the final rate.
struct LrSchedule {
  double initial = 1e-3;
  double final = 1e-3;
  int hold_episodes = 100;
  int decay_episodes = 67;

  double rate(int episode) const {
    if (episode < hold_episodes) return initial;
    const int into = episode - hold_episodes;
    if (into >= decay_episodes) return final;
    return initial +
           (final - initial) * static_cast<double>(into) / decay_episodes;
  }

  void validate() const {
    if (final > initial) {
      throw std::invalid_argument("LrSchedule: final rate above initial");
    }
    if (hold_episodes < 0 || decay_episodes <= 0) {
      throw std::invalid_argument("LrSchedule: horizons must be non-negative");
    }
  }
};

/// Adam with bias correction. Non-finite gradients skip the step and bump a
/// counter instead of corrupting the parameters.
template <typename Scalar>
class Adam {
 public:
  Adam(const Mlp<Scalar>& net, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    mw_.resize(net.layers.size());
    vw_.resize(net.layers.size());
    mb_.resize(net.layers.size());
    vb_.resize(net.layers.size());
    for (size_t l = 0; l < net.layers.size(); ++l) {
      mw_[l].setZero(net.layers[l].weight.rows(), net.layers[l].weight.cols());
      vw_[l] = mw_[l];
      mb_[l].setZero(net.layers[l].bias.size());
      vb_[l] = mb_[l];
    }
  }

  void set_rate(double lr) { lr_ = lr; }
  double rate() const { return lr_; }
  long steps() const { return steps_; }
  int skipped() const { return skipped_; }

  void step(Mlp<Scalar>& net, const MlpGradients<Scalar>& grads) {
    if (!grads.finite()) {
      ++skipped_;
      return;
    }
    ++steps_;
    const Scalar b1 = static_cast<Scalar>(beta1_);
    const Scalar b2 = static_cast<Scalar>(beta2_);
    const Scalar correction1 =
        static_cast<Scalar>(1.0 - std::pow(beta1_, steps_));
    const Scalar correction2 =
        static_cast<Scalar>(1.0 - std::pow(beta2_, steps_));
    const Scalar alpha = static_cast<Scalar>(lr_) *
                         std::sqrt(correction2) / correction1;
    const Scalar eps = static_cast<Scalar>(eps_);

    for (size_t l = 0; l < net.layers.size(); ++l) {
      auto& w = net.layers[l].weight;
      mw_[l] = b1 * mw_[l] + (Scalar(1) - b1) * grads.dw[l];
      vw_[l].array() = b2 * vw_[l].array() +
                       (Scalar(1) - b2) * grads.dw[l].array().square();
      w.array() -= alpha * mw_[l].array() / (vw_[l].array().sqrt() + eps);

      auto& b = net.layers[l].bias;
      mb_[l] = b1 * mb_[l] + (Scalar(1) - b1) * grads.db[l];
      vb_[l].array() = b2 * vb_[l].array() +
                       (Scalar(1) - b2) * grads.db[l].array().square();
      b.array() -= alpha * mb_[l].array() / (vb_[l].array().sqrt() + eps);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  int skipped_ = 0;
  std::vector<typename Mlp<Scalar>::Matrix> mw_, vw_;
  std::vector<typename Mlp<Scalar>::Vector> mb_, vb_;
};

/// Polyak averaging p' <- tau p + (1 - tau) p'.
template <typename Scalar>
void soft_update(Mlp<Scalar>& target, const Mlp<Scalar>& online, double tau) {
  if (!target.same_architecture(online)) {
    throw std::invalid_argument("soft_update: architecture mismatch");
  }
  const Scalar t = static_cast<Scalar>(tau);
  for (size_t l = 0; l < target.layers.size(); ++l) {
    target.layers[l].weight =
        t * online.layers[l].weight + (Scalar(1) - t) * target.layers[l].weight;
    target.layers[l].bias =
        t * online.layers[l].bias + (Scalar(1) - t) * target.layers[l].bias;
  }
}

}  // namespace ctph
