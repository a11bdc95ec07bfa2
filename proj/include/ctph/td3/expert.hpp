#pragma once

#include <random>

#include "ctph/nn/mlp.hpp"
#include "ctph/td3/env.hpp"

namespace ctph {

/// Hand-tuned horizontal PD teacher acting on one axis (integral unused).
struct ExpertGains {
  double kp = 2.0;
  double kd = 0.5;
};

/// PD law on (error, velocity) with the error rate taken as -v (fixed
/// target), output clipped to the normalized action range [-1, 1].
double expert_pd_action(double error, double velocity,
                        const ExpertGains& gains = {});

/// Demonstration set: one column per (observation, action) pair, both
/// horizontal axes pooled.
struct ExpertDataset {
  Eigen::MatrixXf obs;      // 7 x N
  Eigen::MatrixXf actions;  // 1 x N
};

ExpertDataset collect_expert_dataset(HoverEnv& env, std::mt19937_64& rng,
                                     const ExpertGains& gains = {},
                                     int episodes = 100, int steps = 750);

struct ExpertTrainResult {
  Mlp<float> net;
  double heldout_mse = 0.0;
  int epochs = 0;
  bool converged = false;
};

/// Behavior cloning: fits the 7-128-128-1 tanh network to the dataset by
/// minibatch MSE regression until a held-out split drops below `target_mse`
/// (or max_epochs passes; non-convergence is reported, not thrown).
ExpertTrainResult train_expert(const ExpertDataset& data, std::mt19937_64& rng,
                               double target_mse = 1e-3, int max_epochs = 300);

}  // namespace ctph
