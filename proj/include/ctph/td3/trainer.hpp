#pragma once

#include <cstdint>
#include <vector>

#include "ctph/td3/agent.hpp"
#include "ctph/td3/env.hpp"
#include "ctph/td3/expert.hpp"

namespace ctph {

/// One learning-curve row per training episode.
struct EpisodeStats {
  int episode = 0;
  double mean_reward = 0.0;  ///< per-step reward averaged over both agents
  double rmsne = 0.0;        ///< on the horizontal error norm
  double alpha_mean = 0.0;   ///< fusion coefficient averaged over updates
  double lambda_mean = 0.0;  ///< imitation weight averaged over updates
  double xi = 0.0;           ///< takeover probability at episode end
  std::size_t main_size = 0, high_size = 0;
  bool diverged = false;
};

/// Full training loop: two per-axis agents sharing one expert and one
/// environment, updated once per environment step with delayed policy and
/// target updates.
class Trainer {
 public:
  struct Result {
    std::vector<EpisodeStats> curves;
    Mlp<float> actor_x, actor_y;
    double expert_mse = 0.0;
    bool expert_converged = true;
    int divergent_episodes = 0;
  };

  Trainer(const Td3Config& cfg, const QuadrotorParams& params,
          const CascadeConfig& cascade);

  /// Runs the configured number of episodes; fully determined by `seed`.
  Result run(std::uint64_t seed);

 private:
  Td3Config cfg_;
  QuadrotorParams params_;
  CascadeConfig cascade_;
};

}  // namespace ctph
