#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ctph/sim/so3.hpp"
#include "ctph/td3/agent.hpp"
#include "ctph/td3/env.hpp"
#include "ctph/td3/expert.hpp"
#include "ctph/td3/replay.hpp"
#include "ctph/td3/trainer.hpp"

using namespace ctph;

namespace {

Transition make_transition(float error, float reward_value, float tag = 0.0f) {
  Transition t;
  t.obs.setZero();
  t.obs(0) = error;
  t.action = tag;
  t.reward = reward_value;
  t.next.setZero();
  return t;
}

}  // namespace

TEST_CASE("reward: dense term, sparse bonus, threshold jump") {
  const RewardConfig cfg;
  CHECK(reward(0.0, cfg) == doctest::Approx(7.0));
  CHECK(reward(1.0, cfg) ==
        doctest::Approx(2.0 * std::exp(-0.5) - 0.2));  // ~1.01306
  CHECK(reward(1.0, cfg) == doctest::Approx(1.0131).epsilon(1e-4));
  // The 5.0 bonus appears exactly at the 0.01 m threshold.
  const double inside = reward(0.009, cfg);
  const double outside = reward(0.011, cfg);
  CHECK(inside - outside > 4.9);
  CHECK(inside - outside < 5.1);
  CHECK(reward(-0.5, cfg) == doctest::Approx(reward(0.5, cfg)));
}

TEST_CASE("adaptive_alpha: anchor values, bounds, monotonicity") {
  const CriticFusionConfig cfg;
  CHECK(adaptive_alpha(cfg.sigma_th, cfg) == doctest::Approx(0.5));
  CHECK(adaptive_alpha(0.0, cfg) == doctest::Approx(0.37297).epsilon(1e-4));
  CHECK(adaptive_alpha(1e9, cfg) == doctest::Approx(0.7));
  double prev = -1.0;
  for (double s = 0.0; s <= 10.0; s += 0.01) {
    const double a = adaptive_alpha(s, cfg);
    CHECK(a >= cfg.alpha_min);
    CHECK(a <= cfg.alpha_max);
    CHECK(a >= prev);
    prev = a;
  }
}

TEST_CASE("aggregated target is sandwiched between min and mean") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> q(-50.0, 50.0);
  std::uniform_real_distribution<double> au(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double q1 = q(rng), q2 = q(rng), q3 = q(rng);
    const double alpha = au(rng);
    const double mn = std::min({q1, q2, q3});
    const double mean = (q1 + q2 + q3) / 3.0;
    const double target = alpha * mn + (1.0 - alpha) * mean;
    CHECK(target >= mn - 1e-12);
    CHECK(target <= mean + 1e-12);
  }
  // Worked example: Q' = (1,2,3), alpha = 0.5 -> 0.5*1 + 0.5*2 = 1.5.
  CHECK(0.5 * 1.0 + 0.5 * 2.0 == doctest::Approx(1.5));
}

TEST_CASE("imitation weight: decay anchors, cutoff, monotone decrease") {
  const ExpertSchedule cfg;
  CHECK(imitation_weight(0, 0.0, cfg).lambda_t == doctest::Approx(1.0));
  CHECK(imitation_weight(20000, 0.0, cfg).lambda_t == doctest::Approx(0.5));
  CHECK(imitation_weight(75000, 100.0, cfg).lambda == 0.0);
  CHECK(imitation_weight(200000, 100.0, cfg).lambda == 0.0);
  // lambda_P is the sigmoid of the Q gap.
  CHECK(imitation_weight(0, 0.0, cfg).lambda_p == doctest::Approx(0.5));
  CHECK(imitation_weight(0, 100.0, cfg).lambda_p == doctest::Approx(1.0));
  double prev = 2.0;
  for (long t = 0; t < 90000; t += 500) {
    const double l = imitation_weight(t, 0.3, cfg).lambda;
    CHECK(l <= prev + 1e-15);
    CHECK(l >= 0.0);
    CHECK(l <= 1.0);
    prev = l;
  }
}

TEST_CASE("xi ramp is linear, clamped and monotone") {
  const ExpertSchedule cfg;
  CHECK(xi_at(0, cfg) == 0.0);
  CHECK(xi_at(25000, cfg) == doctest::Approx(0.5));
  CHECK(xi_at(50000, cfg) == 1.0);
  CHECK(xi_at(200000, cfg) == 1.0);
}

TEST_CASE("nearest-rank percentile matches a sort oracle") {
  std::vector<float> ten = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::shuffle(ten.begin(), ten.end(), std::mt19937_64(3));
  std::vector<float> scratch = ten;
  CHECK(nearest_rank_percentile(scratch, 0.9) == 9.0f);

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 200);
  std::uniform_real_distribution<float> val(-100.0f, 100.0f);
  std::uniform_real_distribution<double> rho_d(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = len(rng);
    std::vector<float> window(static_cast<std::size_t>(n));
    for (auto& v : window) v = val(rng);
    const double rho = rho_d(rng);

    std::vector<float> sorted = window;
    std::sort(sorted.begin(), sorted.end());
    auto rank = static_cast<std::size_t>(std::ceil(rho * n));
    rank = std::clamp<std::size_t>(rank, 1, static_cast<std::size_t>(n));
    scratch = window;
    CHECK(nearest_rank_percentile(scratch, rho) == sorted[rank - 1]);
  }
}

TEST_CASE("dual replay admission, threshold warmup and FIFO capacity") {
  ReplayConfig cfg;
  cfg.main_capacity = 100;
  cfg.high_capacity = 10;
  cfg.window_length = 50;
  cfg.warmup_length = 20;
  cfg.rho = 0.9;
  cfg.epsilon = 0.001;
  cfg.high_batch_share = 4;
  DualReplay replay(cfg);

  // Before warmup the threshold is -inf: small-error transitions all enter.
  CHECK(replay.threshold() == -std::numeric_limits<double>::infinity());
  CHECK(replay.insert(make_transition(0.0f, -100.0f)));
  // Error gate alone rejects, regardless of reward.
  CHECK_FALSE(replay.insert(make_transition(0.1f, 1000.0f)));

  // Ramp the window past warmup with rewards 1..30.
  for (int r = 1; r <= 30; ++r) {
    replay.insert(make_transition(0.5f, static_cast<float>(r)));
  }
  CHECK(replay.threshold() > 0.0);
  // Admission screens against the threshold computed before the insert.
  const double th = replay.threshold();
  CHECK(replay.insert(make_transition(0.0f, static_cast<float>(th) + 1.0f)));
  CHECK_FALSE(replay.insert(make_transition(0.0f, static_cast<float>(th) -
                                                      100.0f)));

  // FIFO capacity never exceeded.
  for (int i = 0; i < 500; ++i) {
    replay.insert(make_transition(0.0f, 1000.0f + i));
  }
  CHECK(replay.main_size() == 100);
  CHECK(replay.high_size() == 10);
}

TEST_CASE("replay sampling composition") {
  ReplayConfig cfg;
  cfg.main_capacity = 1000;
  cfg.high_capacity = 100;
  cfg.window_length = 100;
  cfg.warmup_length = 100;  // threshold stays -inf for this test
  cfg.high_batch_share = 8;
  DualReplay replay(cfg);
  std::mt19937_64 rng(5);

  CHECK_THROWS_AS((void)replay.sample(32, rng), std::runtime_error);

  // Main-only transitions (tag 0), no high-reward entries yet.
  for (int i = 0; i < 64; ++i) replay.insert(make_transition(0.5f, 0.0f, 0.0f));
  auto batch = replay.sample(32, rng);
  CHECK(batch.from_high == 0);
  CHECK(batch.items.size() == 32);

  // Admit exactly 2*N_h high-reward transitions (tag 1) -> mixed batches.
  for (int i = 0; i < 16; ++i) replay.insert(make_transition(0.0f, 1.0f, 1.0f));
  CHECK(replay.high_size() == 16);
  batch = replay.sample(32, rng);
  CHECK(batch.from_high == 8);
  CHECK(batch.items.size() == 32);
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    if (i < batch.from_high) CHECK(batch.items[i]->action == 1.0f);
  }
}

TEST_CASE("expert PD law and action selection frequencies") {
  CHECK(expert_pd_action(0.0, 0.0) == 0.0);
  CHECK(expert_pd_action(1.0, 0.0) == 1.0);  // clipped from 2.0
  CHECK(expert_pd_action(0.2, 0.1) == doctest::Approx(0.35));
  CHECK(expert_pd_action(-3.0, 0.0) == -1.0);

  std::mt19937_64 rng(23);
  Td3Config cfg;
  Mlp<float> expert = Mlp<float>::make(
      {7, 128, 128, 1},
      {Activation::tanh, Activation::tanh, Activation::tanh}, rng);
  Td3Agent agent(cfg, rng, &expert);

  Observation obs;
  obs << 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  const float expert_out = agent.expert_action(obs);

  // xi = 0 -> always the expert action.
  for (int i = 0; i < 100; ++i) {
    CHECK(agent.select_action(obs, 0.0, rng) == expert_out);
  }
  // xi = 0.3 -> expert frequency 0.70 +- 0.02 over 1e4 draws.
  int expert_hits = 0;
  for (int i = 0; i < 10000; ++i) {
    if (agent.select_action(obs, 0.3, rng) == expert_out) ++expert_hits;
  }
  CHECK(expert_hits > 6800);
  CHECK(expert_hits < 7200);
}

TEST_CASE("observation packing follows the per-axis layout") {
  QuadrotorState state;  // at origin, level, at rest
  const Eigen::Vector3d torque{0.01, -0.02, 0.003};

  const Observation at_target =
      build_observation(Axis::x, state, 0.0, 0.0, 1.25, torque);
  CHECK(at_target.head<5>().cwiseAbs().maxCoeff() == 0.0);
  CHECK(at_target(5) == 1.25);       // a_z passes through
  CHECK(at_target(6) == -0.02);      // x-axis watches M_y

  const Observation shifted =
      build_observation(Axis::x, state, 1.0, 0.4, 0.0, torque);
  CHECK(shifted(0) == 1.0);   // e = x_d - x
  CHECK(shifted(1) == 0.4);   // previous error passes through

  const Observation y_axis =
      build_observation(Axis::y, state, 0.0, 0.0, 0.0, torque);
  CHECK(y_axis(6) == 0.01);   // y-axis watches M_x

  // Tilt fields: pitch for x, roll for y, with kinematic Euler rates.
  QuadrotorState tilted;
  tilted.rotation = rotation_from_euler({0.1, 0.2, 0.0});
  tilted.angular_velocity << 0.0, 0.5, 0.0;
  const Observation tx =
      build_observation(Axis::x, tilted, 0.0, 0.0, 0.0, torque);
  CHECK(tx(3) == doctest::Approx(0.2));
  const Eigen::Vector3d rate =
      euler_rate_matrix(tilted.euler()) * tilted.angular_velocity;
  CHECK(tx(4) == doctest::Approx(rate.y()));
}

TEST_CASE("environment: previous-error contract and determinism") {
  QuadrotorParams params;
  CascadeConfig cascade;
  Td3Config cfg;
  HoverEnv env(params, cascade, cfg);

  env.reset({2.0, -1.0, 0.0}, Eigen::Vector3d::Zero());
  Observation obs_x = env.observe(Axis::x);
  CHECK(obs_x(0) == doctest::Approx(-2.0));
  CHECK(obs_x(1) == doctest::Approx(-2.0));  // no motion yet

  const auto s1 = env.step(0.5f, -0.25f);
  CHECK(s1.obs_x(1) == doctest::Approx(-2.0));  // previous error carried
  const auto s2 = env.step(0.5f, -0.25f);
  CHECK(s2.obs_x(1) == doctest::Approx(s1.obs_x(0)));

  // Two identical environments follow bitwise-identical trajectories.
  HoverEnv a(params, cascade, cfg), b(params, cascade, cfg);
  a.reset({1.0, 2.0, 0.0}, Eigen::Vector3d::Zero());
  b.reset({1.0, 2.0, 0.0}, Eigen::Vector3d::Zero());
  for (int i = 0; i < 200; ++i) {
    const auto ra = a.step(0.3f, -0.6f);
    const auto rb = b.step(0.3f, -0.6f);
    REQUIRE((ra.obs_x - rb.obs_x).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(ra.reward_y == rb.reward_y);
  }
}

TEST_CASE("behavior cloning fits the PD teacher below 1e-3 held-out MSE") {
  QuadrotorParams params;
  CascadeConfig cascade;
  Td3Config cfg;
  HoverEnv env(params, cascade, cfg);
  std::mt19937_64 rng(31);

  const ExpertDataset data = collect_expert_dataset(env, rng, {}, 12, 400);
  REQUIRE(data.obs.cols() == 12 * 400 * 2);
  const ExpertTrainResult result = train_expert(data, rng);
  CHECK(result.converged);
  CHECK(result.heldout_mse < 1e-3);
}

TEST_CASE("variant switches reproduce the five ablation arms") {
  Td3Config cfg;
  cfg.apply_variant(Td3Variant::ctph);
  CHECK(cfg.use_dual_replay);
  CHECK(cfg.use_expert);
  CHECK(cfg.adaptive_fusion);
  CHECK(cfg.critic_count == 3);

  cfg.apply_variant(Td3Variant::no_dual_replay);
  CHECK_FALSE(cfg.use_dual_replay);
  CHECK(cfg.use_expert);

  cfg.apply_variant(Td3Variant::no_expert);
  CHECK_FALSE(cfg.use_expert);
  CHECK(cfg.use_dual_replay);

  cfg.apply_variant(Td3Variant::two_critic_min);
  CHECK(cfg.critic_count == 2);
  CHECK_FALSE(cfg.adaptive_fusion);
  CHECK(cfg.use_expert);

  cfg.apply_variant(Td3Variant::baseline);
  CHECK_FALSE(cfg.use_dual_replay);
  CHECK_FALSE(cfg.use_expert);
  CHECK_FALSE(cfg.adaptive_fusion);
  CHECK(cfg.critic_count == 2);

  CHECK(variant_from_name(variant_name(Td3Variant::two_critic_min)) ==
        Td3Variant::two_critic_min);
  CHECK_THROWS_AS(variant_from_name("nope"), std::invalid_argument);
}

TEST_CASE("training loop smoke test: short run is stable and deterministic") {
  Td3Config cfg;
  cfg.episodes = 3;
  cfg.steps_per_episode = 120;
  cfg.batch_size = 64;
  cfg.replay.warmup_length = 50;
  cfg.replay.high_batch_share = 16;
  cfg.apply_variant(Td3Variant::ctph);

  QuadrotorParams params;
  CascadeConfig cascade;
  Trainer trainer(cfg, params, cascade);
  const auto r1 = trainer.run(99);
  const auto r2 = trainer.run(99);

  REQUIRE(r1.curves.size() == 3);
  CHECK(r1.expert_converged);
  CHECK(r1.divergent_episodes == 0);
  for (std::size_t i = 0; i < r1.curves.size(); ++i) {
    CHECK(std::isfinite(r1.curves[i].mean_reward));
    CHECK(std::isfinite(r1.curves[i].rmsne));
    CHECK(r1.curves[i].mean_reward == r2.curves[i].mean_reward);
    CHECK(r1.curves[i].rmsne == r2.curves[i].rmsne);
    if (r1.curves[i].alpha_mean != 0.0) {
      CHECK(r1.curves[i].alpha_mean >= cfg.fusion.alpha_min);
      CHECK(r1.curves[i].alpha_mean <= cfg.fusion.alpha_max);
    }
  }
  for (std::size_t l = 0; l < r1.actor_x.layers.size(); ++l) {
    REQUIRE((r1.actor_x.layers[l].weight - r2.actor_x.layers[l].weight)
                .cwiseAbs()
                .maxCoeff() == 0.0f);
  }
}
