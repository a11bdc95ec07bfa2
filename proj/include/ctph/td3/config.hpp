#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "ctph/nn/optim.hpp"

namespace ctph {

// Dense/sparse reward shaping, R = b1*exp(-e^2/2) - b2*|e| + b3*[|e| < radius].
struct RewardConfig {
  double beta1 = 2.0;
  double beta2 = 0.2;
  double beta3 = 5.0;
  double bonus_radius = 0.01;  // m

  void validate() const {
    if (beta1 <= 0 || beta2 <= 0 || beta3 <= 0 || bonus_radius <= 0) {
      throw std::invalid_argument("reward weights must be positive");
    }
  }
};

// Uncertainty-aware blend between the minimum and the mean of the critics.
struct CriticFusionConfig {
  double alpha_min = 0.3;
  double alpha_max = 0.7;
  double sigma_th = 1.5;
  double fixed_alpha = 1.0;  // used when the adaptive rule is disabled

  void validate() const {
    if (!(0.0 <= alpha_min && alpha_min < alpha_max && alpha_max <= 1.0)) {
      throw std::invalid_argument("require 0 <= alpha_min < alpha_max <= 1");
    }
    if (!(fixed_alpha >= 0.0 && fixed_alpha <= 1.0)) {
      throw std::invalid_argument("fixed alpha must be in [0,1]");
    }
  }
};

// Expert takeover probability ramp and imitation-weight schedule.
struct ExpertSchedule {
  long t0 = 75000;        // env steps after which imitation is cut to zero
  double beta = 0.5;      // decay base of lambda_T
  double kappa = 20000.0; // time constant of the decay exponent
  double k = 5.0;         // sigmoid steepness on the Q gap
  long xi_ramp_steps = 50000;  // linear ramp of xi from 0 to 1

  void validate() const {
    if (t0 < 0 || xi_ramp_steps <= 0) {
      throw std::invalid_argument("schedule horizons must be positive");
    }
    if (!(beta > 0.0 && beta < 1.0) || kappa <= 0.0) {
      throw std::invalid_argument("require beta in (0,1) and kappa > 0");
    }
  }
};

// Dual replay: a main FIFO plus a high-reward FIFO gated by a sliding-window
// reward percentile and a small-error condition on the first state field.
struct ReplayConfig {
  std::size_t main_capacity = 50000;
  std::size_t high_capacity = 25000;
  std::size_t window_length = 5000;   // L
  std::size_t warmup_length = 1000;   // L_m: below this the threshold is -inf
  double rho = 0.9;                   // percentile (nearest rank)
  double epsilon = 0.001;             // |s^(0)| admission gate, m
  std::size_t high_batch_share = 64;  // N_h

  void validate() const {
    if (main_capacity == 0 || high_capacity == 0 || window_length == 0) {
      throw std::invalid_argument("replay capacities must be positive");
    }
    if (warmup_length > window_length) {
      throw std::invalid_argument("warmup length exceeds window length");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw std::invalid_argument("percentile must be in [0,1]");
    }
  }
};

// The five experiment arms: the full controller and its ablations.
enum class Td3Variant {
  ctph,            // all three enhancements
  no_dual_replay,  // ablation A
  no_expert,       // ablation B
  two_critic_min,  // ablation C
  baseline,        // plain TD3
};

const char* variant_name(Td3Variant v);
Td3Variant variant_from_name(const std::string& name);

struct Td3Config {
  double gamma = 0.99;
  double tau = 5e-3;
  int policy_delay = 2;
  std::size_t batch_size = 256;
  double exploration_noise = 0.1;  // sigma on executed actions
  double smoothing_noise = 0.2;    // sigma on target-policy smoothing
  double smoothing_clip = 0.5;
  double accel_limit = 5.0;        // A_max, m/s^2: f = m * A_max * a
  bool normalize_obs = true;       // standardize features at the net boundary

  LrSchedule actor_lr{5e-4, 1e-4, 100, 67};
  LrSchedule critic_lr{1e-3, 1e-5, 100, 67};

  int episodes = 200;
  int steps_per_episode = 750;

  RewardConfig reward;
  CriticFusionConfig fusion;
  ExpertSchedule schedule;
  ReplayConfig replay;

  // Ablation switches; all true/3 for the full CTPH configuration.
  bool use_dual_replay = true;
  bool use_expert = true;
  bool adaptive_fusion = true;  // false: fusion.fixed_alpha (1 = pure minimum)
  int critic_count = 3;

  void apply_variant(Td3Variant v) {
    use_dual_replay = true;
    use_expert = true;
    adaptive_fusion = true;
    critic_count = 3;
    switch (v) {
      case Td3Variant::ctph:
        break;
      case Td3Variant::no_dual_replay:
        use_dual_replay = false;
        break;
      case Td3Variant::no_expert:
        use_expert = false;
        break;
      case Td3Variant::two_critic_min:
        adaptive_fusion = false;
        critic_count = 2;
        break;
      case Td3Variant::baseline:
        use_dual_replay = false;
        use_expert = false;
        adaptive_fusion = false;
        critic_count = 2;
        break;
    }
  }

  void validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("discount must be in [0,1)");
    }
    if (!(tau > 0.0 && tau <= 1.0) || policy_delay < 1 || batch_size == 0) {
      throw std::invalid_argument("invalid TD3 core parameters");
    }
    if (accel_limit <= 0.0 || episodes <= 0 || steps_per_episode <= 0) {
      throw std::invalid_argument("invalid training horizon");
    }
    if (critic_count < 2 || critic_count > 3) {
      throw std::invalid_argument("critic count must be 2 or 3");
    }
    if (replay.high_batch_share >= batch_size) {
      throw std::invalid_argument("high-reward share must be below batch size");
    }
    reward.validate();
    fusion.validate();
    schedule.validate();
    replay.validate();
    actor_lr.validate();
    critic_lr.validate();
  }
};

}  // namespace ctph
