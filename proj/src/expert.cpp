#include "ctph/td3/expert.hpp"

#include <algorithm>
#include <numeric>

#include "ctph/nn/optim.hpp"

namespace ctph {

double expert_pd_action(double error, double velocity,
                        const ExpertGains& gains) {
  return std::clamp(gains.kp * error - gains.kd * velocity, -1.0, 1.0);
}

ExpertDataset collect_expert_dataset(HoverEnv& env, std::mt19937_64& rng,
                                     const ExpertGains& gains, int episodes,
                                     int steps) {
  const long total = 2L * episodes * steps;
  ExpertDataset data;
  data.obs.resize(7, total);
  data.actions.resize(1, total);

  long n = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset_random(rng);
    Observation obs_x = env.observe(Axis::x);
    Observation obs_y = env.observe(Axis::y);
    for (int t = 0; t < steps; ++t) {
      const double a_x = expert_pd_action(obs_x(0), obs_x(2), gains);
      const double a_y = expert_pd_action(obs_y(0), obs_y(2), gains);
      data.obs.col(n) = net_input(obs_x);
      data.actions(0, n++) = static_cast<float>(a_x);
      data.obs.col(n) = net_input(obs_y);
      data.actions(0, n++) = static_cast<float>(a_y);
      const auto result =
          env.step(static_cast<float>(a_x), static_cast<float>(a_y));
      if (result.diverged) break;
      obs_x = result.obs_x;
      obs_y = result.obs_y;
    }
  }
  data.obs.conservativeResize(Eigen::NoChange, n);
  data.actions.conservativeResize(Eigen::NoChange, n);
  return data;
}

ExpertTrainResult train_expert(const ExpertDataset& data, std::mt19937_64& rng,
                               double target_mse, int max_epochs) {
  const auto total = data.obs.cols();
  if (total < 10) throw std::invalid_argument("expert dataset too small");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const Eigen::Index held = std::max<Eigen::Index>(1, total / 10);

  Eigen::MatrixXf held_obs(7, held), held_act(1, held);
  for (Eigen::Index i = 0; i < held; ++i) {
    held_obs.col(i) = data.obs.col(order[static_cast<std::size_t>(i)]);
    held_act.col(i) = data.actions.col(order[static_cast<std::size_t>(i)]);
  }
  std::vector<Eigen::Index> train(order.begin() + held, order.end());

  ExpertTrainResult result;
  result.net = Mlp<float>::make(
      {7, 128, 128, 1},
      {Activation::tanh, Activation::tanh, Activation::tanh}, rng);
  Adam<float> opt(result.net, 2e-3);
  MlpCache<float> cache;
  MlpGradients<float> grads;

  const Eigen::Index B = 256;
  Eigen::MatrixXf batch_obs(7, B), batch_act(1, B), upstream(1, B);
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t at = 0; at + B <= train.size(); at += B) {
      for (Eigen::Index b = 0; b < B; ++b) {
        batch_obs.col(b) = data.obs.col(train[at + b]);
        batch_act.col(b) = data.actions.col(train[at + b]);
      }
      const auto& out = forward(result.net, batch_obs, cache);
      upstream = 2.0f * (out - batch_act) / static_cast<float>(B);
      backward(result.net, cache, upstream, grads);
      opt.step(result.net, grads);
    }
    const auto& held_out = forward(result.net, held_obs, cache);
    result.heldout_mse = (held_out - held_act).array().square().mean();
    result.epochs = epoch;
    if (result.heldout_mse < target_mse) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace ctph
