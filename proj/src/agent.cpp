#include "ctph/td3/agent.hpp"

#include <algorithm>
#include <cmath>

namespace ctph {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Td3Agent::Net make_actor(std::mt19937_64& rng) {
  return Td3Agent::Net::make(
      {7, 64, 64, 1}, {Activation::tanh, Activation::tanh, Activation::tanh},
      rng);
}

Td3Agent::Net make_critic(std::mt19937_64& rng) {
  return Td3Agent::Net::make(
      {8, 64, 64, 1}, {Activation::relu, Activation::relu, Activation::linear},
      rng);
}

}  // namespace

double adaptive_alpha(double sigma_q, const CriticFusionConfig& cfg) {
  return cfg.alpha_min +
         (cfg.alpha_max - cfg.alpha_min) * sigmoid(sigma_q - cfg.sigma_th);
}

ImitationWeight imitation_weight(long t, double dq, const ExpertSchedule& cfg) {
  ImitationWeight w;
  w.lambda_t = t < cfg.t0
                   ? std::pow(cfg.beta, static_cast<double>(t) / cfg.kappa)
                   : 0.0;
  w.lambda_p = sigmoid(cfg.k * dq);
  w.lambda = w.lambda_t * w.lambda_p;
  return w;
}

double xi_at(long t, const ExpertSchedule& cfg) {
  return std::min(1.0, static_cast<double>(t) /
                           static_cast<double>(cfg.xi_ramp_steps));
}

Td3Agent::Td3Agent(const Td3Config& cfg, std::mt19937_64& rng,
                   const Net* expert)
    : cfg_(cfg),
      expert_(cfg.use_expert ? expert : nullptr),
      actor_(make_actor(rng)),
      actor_target_(actor_),
      critics_{make_critic(rng), make_critic(rng), make_critic(rng)},
      critic_targets_(critics_),
      actor_opt_(actor_, cfg.actor_lr.rate(0)),
      critic_opts_{Adam<float>(critics_[0], cfg.critic_lr.rate(0)),
                   Adam<float>(critics_[1], cfg.critic_lr.rate(0)),
                   Adam<float>(critics_[2], cfg.critic_lr.rate(0))},
      replay_(cfg.replay, cfg.use_dual_replay) {
  cfg_.validate();
  if (cfg_.use_expert && expert_ == nullptr) {
    throw std::invalid_argument("expert-guided configuration without expert");
  }
}

float Td3Agent::select_action(const Observation& obs, double xi,
                              std::mt19937_64& rng) {
  bool use_policy = true;
  if (expert_ != nullptr) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    use_policy = u(rng) < xi;
  }
  if (!use_policy) return expert_action(obs);
  std::normal_distribution<double> noise(0.0, cfg_.exploration_noise);
  const double a = policy(obs) + noise(rng);
  return static_cast<float>(std::clamp(a, -1.0, 1.0));
}

float Td3Agent::policy(const Observation& obs) const {
  const Net::Vector x = net_input(obs, cfg_.normalize_obs);
  return forward(actor_, x)(0);
}

float Td3Agent::expert_action(const Observation& obs) const {
  const Net::Vector x = net_input(obs, cfg_.normalize_obs);
  return forward(*expert_, x)(0);
}

void Td3Agent::begin_episode(int episode) {
  actor_opt_.set_rate(cfg_.actor_lr.rate(episode));
  for (auto& opt : critic_opts_) opt.set_rate(cfg_.critic_lr.rate(episode));
}

void Td3Agent::set_actor(const Net& net) {
  if (!net.same_architecture(actor_)) {
    throw std::invalid_argument("actor checkpoint has the wrong architecture");
  }
  actor_ = net;
  actor_target_ = net;
}

void Td3Agent::update(long t, std::mt19937_64& rng) {
  const auto batch = replay_.sample(cfg_.batch_size, rng);
  const auto B = static_cast<Eigen::Index>(cfg_.batch_size);
  const int n_critics = cfg_.critic_count;

  obs_.resize(7, B);
  obs_act_.resize(8, B);
  next_obs_.resize(7, B);
  next_in_.resize(8, B);
  y_.resize(1, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Transition& tr = *batch.items[b];
    obs_.col(b) = tr.obs;
    obs_act_.col(b).head<7>() = tr.obs;
    obs_act_(7, b) = tr.action;
    next_obs_.col(b) = tr.next;
    next_in_.col(b).head<7>() = tr.next;
  }

  // Smoothed target action a' = clip(pi'(s') + clip(noise)).
  const auto& a_next = forward(actor_target_, next_obs_, target_cache_);
  std::normal_distribution<float> smear(0.0f,
                                        static_cast<float>(cfg_.smoothing_noise));
  const float clip = static_cast<float>(cfg_.smoothing_clip);
  for (Eigen::Index b = 0; b < B; ++b) {
    const float eps = std::clamp(smear(rng), -clip, clip);
    next_in_(7, b) = std::clamp(a_next(0, b) + eps, -1.0f, 1.0f);
  }

  // Aggregated target: alpha from the batch-mean spread of the critics.
  q_next_.resize(n_critics, B);
  for (int i = 0; i < n_critics; ++i) {
    q_next_.row(i) = forward(critic_targets_[i], next_in_, target_cache_);
  }
  Eigen::RowVectorXf q_min = q_next_.colwise().minCoeff();
  Eigen::RowVectorXf q_mean = q_next_.colwise().mean();
  double alpha = cfg_.fusion.fixed_alpha;
  if (cfg_.adaptive_fusion) {
    double sigma_sum = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto col = q_next_.col(b);
      const float var = (col.array() - q_mean(b)).square().sum() / n_critics;
      sigma_sum += std::sqrt(static_cast<double>(var));
    }
    alpha = adaptive_alpha(sigma_sum / B, cfg_.fusion);
  }
  last_alpha_ = alpha;

  const float af = static_cast<float>(alpha);
  const float gamma = static_cast<float>(cfg_.gamma);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Transition& tr = *batch.items[b];
    const float q_tgt = af * q_min(b) + (1.0f - af) * q_mean(b);
    y_(0, b) = tr.reward + (tr.done ? 0.0f : gamma * q_tgt);
  }

  // Independent regression of each critic to the shared target.
  for (int i = 0; i < n_critics; ++i) {
    const auto& q = forward(critics_[i], obs_act_, critic_cache_);
    upstream_ = 2.0f * (q - y_) / static_cast<float>(B);
    backward(critics_[i], critic_cache_, upstream_, grads_);
    critic_opts_[i].step(critics_[i], grads_);
  }

  if (t % cfg_.policy_delay != 0) return;

  // Deterministic policy gradient through critic 1, plus the imitation term.
  const auto& a_pi = forward(actor_, obs_, actor_cache_);
  pi_in_.resize(8, B);
  pi_in_.topRows(7) = obs_;
  pi_in_.row(7) = a_pi;
  const auto& q1 = forward(critics_[0], pi_in_, critic_cache_);
  const double q1_pi_mean = q1.mean();
  upstream_.setConstant(1, B, -1.0f / static_cast<float>(B));
  backward(critics_[0], critic_cache_, upstream_, discard_, &dq_da_);
  actor_up_ = dq_da_.row(7);

  ImitationWeight lw;  // zero when the expert is disabled or decayed out
  if (expert_ != nullptr) {
    lw = imitation_weight(t, last_dq_, cfg_.schedule);
    if (lw.lambda_t > 0.0) {
      const auto& a_e = forward(*expert_, obs_, expert_cache_);
      actor_up_ += (2.0f * static_cast<float>(lw.lambda) /
                    static_cast<float>(B)) *
                   (a_pi - a_e);
      pi_in_.row(7) = a_e;
      const double q1_e_mean =
          forward(critics_[0], pi_in_, critic_cache_).mean();
      last_dq_ = q1_e_mean - q1_pi_mean;
    } else {
      lw.lambda = 0.0;
    }
  }
  last_lambda_ = lw.lambda;

  backward(actor_, actor_cache_, actor_up_, grads_);
  actor_opt_.step(actor_, grads_);

  soft_update(actor_target_, actor_, cfg_.tau);
  for (int i = 0; i < n_critics; ++i) {
    soft_update(critic_targets_[i], critics_[i], cfg_.tau);
  }
}

}  // namespace ctph
