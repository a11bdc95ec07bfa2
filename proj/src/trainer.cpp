#include "ctph/td3/trainer.hpp"

#include <cmath>

#include "ctph/eval/metrics.hpp"

namespace ctph {

const char* variant_name(Td3Variant v) {
  switch (v) {
    case Td3Variant::ctph: return "ctph";
    case Td3Variant::no_dual_replay: return "no-dual-replay";
    case Td3Variant::no_expert: return "no-expert";
    case Td3Variant::two_critic_min: return "two-critic";
    case Td3Variant::baseline: return "td3";
  }
  return "ctph";
}

Td3Variant variant_from_name(const std::string& name) {
  if (name == "ctph") return Td3Variant::ctph;
  if (name == "no-dual-replay") return Td3Variant::no_dual_replay;
  if (name == "no-expert") return Td3Variant::no_expert;
  if (name == "two-critic") return Td3Variant::two_critic_min;
  if (name == "td3") return Td3Variant::baseline;
  throw std::invalid_argument("unknown variant: " + name);
}

Trainer::Trainer(const Td3Config& cfg, const QuadrotorParams& params,
                 const CascadeConfig& cascade)
    : cfg_(cfg), params_(params), cascade_(cascade) {
  cfg_.validate();
  params_.validate();
}

Trainer::Result Trainer::run(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  HoverEnv env(params_, cascade_, cfg_);
  Result result;

  Mlp<float> expert_net;
  const Mlp<float>* expert = nullptr;
  if (cfg_.use_expert) {
    const ExpertDataset data = collect_expert_dataset(env, rng);
    ExpertTrainResult trained = train_expert(data, rng);
    result.expert_mse = trained.heldout_mse;
    result.expert_converged = trained.converged;
    expert_net = std::move(trained.net);
    expert = &expert_net;
  }

  Td3Agent agent_x(cfg_, rng, expert);
  Td3Agent agent_y(cfg_, rng, expert);

  long t = 0;
  std::vector<double> errors;
  errors.reserve(static_cast<std::size_t>(cfg_.steps_per_episode));
  for (int ep = 0; ep < cfg_.episodes; ++ep) {
    agent_x.begin_episode(ep);
    agent_y.begin_episode(ep);
    env.reset_random(rng);
    Observation obs_x = env.observe(Axis::x);
    Observation obs_y = env.observe(Axis::y);
    const double e0 = std::hypot(obs_x(0), obs_y(0));

    errors.clear();
    double reward_sum = 0.0, alpha_sum = 0.0, lambda_sum = 0.0;
    long updates = 0;
    bool diverged = false;
    int steps_done = 0;
    for (int k = 0; k < cfg_.steps_per_episode; ++k) {
      const double xi = cfg_.use_expert ? xi_at(t, cfg_.schedule) : 1.0;
      const float a_x = agent_x.select_action(obs_x, xi, rng);
      const float a_y = agent_y.select_action(obs_y, xi, rng);
      const HoverEnv::Step sr = env.step(a_x, a_y);
      if (sr.diverged) {
        diverged = true;
        break;
      }
      const bool norm = cfg_.normalize_obs;
      agent_x.store({net_input(obs_x, norm), a_x,
                     static_cast<float>(sr.reward_x), net_input(sr.obs_x, norm),
                     false});
      agent_y.store({net_input(obs_y, norm), a_y,
                     static_cast<float>(sr.reward_y), net_input(sr.obs_y, norm),
                     false});
      obs_x = sr.obs_x;
      obs_y = sr.obs_y;

      if (agent_x.ready()) {
        agent_x.update(t, rng);
        agent_y.update(t, rng);
        alpha_sum += 0.5 * (agent_x.last_alpha() + agent_y.last_alpha());
        lambda_sum += 0.5 * (agent_x.last_lambda() + agent_y.last_lambda());
        ++updates;
      }
      reward_sum += 0.5 * (sr.reward_x + sr.reward_y);
      errors.push_back(std::hypot(sr.obs_x(0), sr.obs_y(0)));
      ++t;
      ++steps_done;
    }

    EpisodeStats st;
    st.episode = ep;
    st.diverged = diverged;
    if (diverged) ++result.divergent_episodes;
    st.mean_reward = steps_done > 0 ? reward_sum / steps_done : 0.0;
    st.rmsne = errors.size() >= 2 ? rmsne(errors, e0) : 0.0;
    st.alpha_mean = updates > 0 ? alpha_sum / updates : 0.0;
    st.lambda_mean = updates > 0 ? lambda_sum / updates : 0.0;
    st.xi = cfg_.use_expert ? xi_at(t, cfg_.schedule) : 1.0;
    st.main_size = agent_x.replay().main_size();
    st.high_size = agent_x.replay().high_size();
    result.curves.push_back(st);
  }

  result.actor_x = agent_x.actor();
  result.actor_y = agent_y.actor();
  return result;
}

}  // namespace ctph
