#include "ctph/td3/env.hpp"

#include "ctph/sim/dynamics.hpp"

namespace ctph {

HoverEnv::HoverEnv(const QuadrotorParams& params, const CascadeConfig& cascade,
                   const Td3Config& cfg, double dt)
    : true_params_(params), cfg_(cfg), cascade_(params, cascade), dt_(dt) {
  params.validate();
}

void HoverEnv::reset(const Eigen::Vector3d& start,
                     const Eigen::Vector3d& target, double psi_d) {
  state_ = QuadrotorState{};
  state_.position = start;
  target_ = target;
  psi_d_ = psi_d;
  cascade_.reset();
  prev_e_x_ = target_.x() - start.x();
  prev_e_y_ = target_.y() - start.y();
  a_z_ = 0.0;
  last_wrench_ = Wrench{};
}

void HoverEnv::reset_random(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const double x = u(rng);
  const double y = u(rng);
  reset({x, y, 0.0}, Eigen::Vector3d::Zero());
}

void HoverEnv::set_target(const Eigen::Vector3d& target, double psi_d) {
  target_ = target;
  psi_d_ = psi_d;
}

Observation HoverEnv::observe(Axis axis) const {
  const double prev = axis == Axis::x ? prev_e_x_ : prev_e_y_;
  const double target = axis == Axis::x ? target_.x() : target_.y();
  return build_observation(axis, state_, target, prev, a_z_,
                           last_wrench_.torque);
}

HoverEnv::Step HoverEnv::step(float action_x, float action_y,
                              const DisturbanceWrench& disturbance) {
  const double scale = cascade_.params().mass * cfg_.accel_limit;
  CascadeSetpoint sp;
  sp.z_d = target_.z();
  sp.psi_d = psi_d_;
  sp.f_x = scale * static_cast<double>(action_x);
  sp.f_y = scale * static_cast<double>(action_y);

  const auto out = cascade_.control(state_, sp, dt_);
  const QuadrotorState prev = state_;
  Step result;
  try {
    state_ = ctph::step(state_, out.wrench, disturbance, dt_, true_params_);
  } catch (const DivergenceError&) {
    state_ = prev;
    result.diverged = true;
  }
  if (!result.diverged) {
    cascade_.observe(prev, state_, out.wrench, dt_);
  }

  // The observation carries the controls that produced this state and the
  // error of the state they acted on.
  const double e_x = target_.x() - state_.position.x();
  const double e_y = target_.y() - state_.position.y();
  const double prev_x = target_.x() - prev.position.x();
  const double prev_y = target_.y() - prev.position.y();
  a_z_ = out.a_z;
  last_wrench_ = out.wrench;
  result.obs_x = build_observation(Axis::x, state_, target_.x(), prev_x, a_z_,
                                   last_wrench_.torque);
  result.obs_y = build_observation(Axis::y, state_, target_.y(), prev_y, a_z_,
                                   last_wrench_.torque);
  result.reward_x = reward(e_x, cfg_.reward);
  result.reward_y = reward(e_y, cfg_.reward);
  prev_e_x_ = e_x;
  prev_e_y_ = e_y;
  return result;
}

}  // namespace ctph
