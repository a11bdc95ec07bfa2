#pragma once

#include <array>
#include <random>

#include "ctph/nn/mlp.hpp"
#include "ctph/nn/optim.hpp"
#include "ctph/td3/config.hpp"
#include "ctph/td3/observation.hpp"
#include "ctph/td3/replay.hpp"

namespace ctph {

/// Fusion coefficient of Eq.-style alpha scheduling: sigmoid-modulated blend
/// position between conservative (min) and optimistic (mean) aggregation.
double adaptive_alpha(double sigma_q, const CriticFusionConfig& cfg);

struct ImitationWeight {
  double lambda_t = 0.0;
  double lambda_p = 0.0;
  double lambda = 0.0;
};

/// Time-decayed, performance-modulated imitation weight; t in env steps.
ImitationWeight imitation_weight(long t, double dq, const ExpertSchedule& cfg);

/// Linear takeover-probability ramp, 0 at t = 0 reaching 1 at the ramp end.
double xi_at(long t, const ExpertSchedule& cfg);

/// One TD3 agent controlling a single horizontal axis: tanh actor, up to
/// three critics with aggregated targets, optional expert guidance and dual
/// replay. All learning runs in float32.
class Td3Agent {
 public:
  using Net = Mlp<float>;

  /// `expert` may be null (variant B / baseline); it is not owned.
  Td3Agent(const Td3Config& cfg, std::mt19937_64& rng, const Net* expert);

  /// Eq.-(18)-style action selection: TD3 policy plus exploration noise with
  /// probability xi, expert policy otherwise.
  float select_action(const Observation& obs, double xi, std::mt19937_64& rng);

  /// Deterministic policy output (evaluation path).
  float policy(const Observation& obs) const;

  float expert_action(const Observation& obs) const;

  void store(const Transition& t) { replay_.insert(t); }
  bool ready() const { return replay_.main_size() >= cfg_.batch_size; }

  /// One critic update on a sampled mini-batch, plus the delayed actor and
  /// target updates when `t` hits the policy-delay phase.
  void update(long t, std::mt19937_64& rng);

  /// Applies the per-episode learning-rate schedule.
  void begin_episode(int episode);

  const Net& actor() const { return actor_; }
  void set_actor(const Net& net);

  const DualReplay& replay() const { return replay_; }
  double last_alpha() const { return last_alpha_; }
  double last_lambda() const { return last_lambda_; }
  double last_dq() const { return last_dq_; }

 private:
  Td3Config cfg_;
  const Net* expert_;

  Net actor_, actor_target_;
  std::array<Net, 3> critics_, critic_targets_;
  Adam<float> actor_opt_;
  std::array<Adam<float>, 3> critic_opts_;
  DualReplay replay_;

  // Scratch reused across updates.
  Eigen::MatrixXf obs_, obs_act_, next_obs_, next_in_, pi_in_;
  Eigen::MatrixXf q_next_, y_, upstream_, actor_up_, dq_da_;
  MlpCache<float> critic_cache_, target_cache_, actor_cache_, expert_cache_;
  MlpGradients<float> grads_, discard_;

  double last_alpha_ = 1.0;
  double last_lambda_ = 0.0;
  double last_dq_ = 0.0;
};

}  // namespace ctph
