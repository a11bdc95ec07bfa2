#include "ctph/hdob/observer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctph {

void HdobConfig::validate() const {
  if (median_window < 3 || median_window % 2 == 0) {
    throw std::invalid_argument("HdobConfig: median_window must be odd, >= 3");
  }
  for (int i = 0; i < 4; ++i) {
    if (!(lowpass_alpha(i) > 0.0 && lowpass_alpha(i) <= 1.0)) {
      throw std::invalid_argument("HdobConfig: lowpass_alpha must be in (0,1]");
    }
    if (!(ema_beta(i) >= 0.0 && ema_beta(i) < 1.0)) {
      throw std::invalid_argument("HdobConfig: ema_beta must be in [0,1)");
    }
    if (!(residual_threshold(i) > 0.0)) {
      throw std::invalid_argument(
          "HdobConfig: residual_threshold must be positive");
    }
  }
  if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0)) {
    throw std::invalid_argument("HdobConfig: fusion_weight must be in [0,1]");
  }
}

Eigen::Vector4d raw_estimate(const QuadrotorState& prev,
                             const QuadrotorState& now, const Wrench& applied,
                             double dt, const QuadrotorParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("raw_estimate: dt <= 0");

  const double a_z = (now.velocity.z() - prev.velocity.z()) / dt;
  // Earth-frame vertical component of the body-z thrust at the instant the
  // wrench was applied.
  const double f_u_z = applied.thrust * prev.rotation(2, 2);

  const Eigen::Vector3d w_dot =
      (now.angular_velocity - prev.angular_velocity) / dt;
  const Eigen::Vector3d inertia = params.inertia_diagonal();
  const Eigen::Vector3d iw = inertia.cwiseProduct(prev.angular_velocity);
  const Eigen::Vector3d m_d = inertia.cwiseProduct(w_dot) +
                              prev.angular_velocity.cross(iw) - applied.torque;

  Eigen::Vector4d out;
  out(kChanFz) =
      params.mass * a_z - (f_u_z - params.mass * params.gravity);
  out.tail<3>() = m_d;
  return out;
}

double median_filter(const std::deque<double>& buffer) {
  if (buffer.empty()) throw std::invalid_argument("median_filter: empty");
  std::vector<double> sorted(buffer.begin(), buffer.end());
  const auto mid = sorted.begin() + (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), mid, sorted.end());
  // Lower-median convention for transient even-sized fills; the steady-state
  // window length is odd.
  return *mid;
}

double gated_lowpass(double d_b_prev, double x_hat, double x_med, double delta,
                     double alpha) {
  if (std::abs(x_hat - x_med) > delta) return d_b_prev;
  return d_b_prev + alpha * (x_hat - d_b_prev);
}

double ema_filter(double d_e_prev, double x_hat, double beta) {
  return beta * d_e_prev + (1.0 - beta) * x_hat;
}

double fuse(double d_b, double d_e, double lambda_d) {
  return lambda_d * d_b + (1.0 - lambda_d) * d_e;
}

CompensatedCommand compensate(double a_z, const Eigen::Vector3d& m_d,
                              const Eigen::Vector4d& d_est,
                              const QuadrotorParams& params) {
  CompensatedCommand out;
  out.f_z = params.mass * (params.gravity + a_z) - d_est(kChanFz);
  const Eigen::Vector3d inertia = params.inertia_diagonal();
  out.angular_accel =
      (m_d - Eigen::Vector3d(d_est.tail<3>())).cwiseQuotient(inertia);
  return out;
}

HybridObserver::HybridObserver(const HdobConfig& config,
                               const QuadrotorParams& params, Mode mode)
    : config_(config), params_(params), mode_(mode) {
  config_.validate();
}

void HybridObserver::update(const QuadrotorState& prev,
                            const QuadrotorState& now, const Wrench& applied,
                            double dt) {
  raw_ = raw_estimate(prev, now, applied, dt, params_);

  for (int i = 0; i < 4; ++i) {
    if (mode_ == Mode::lowpass_only) {
      // Conventional DOB: the low-pass update branch taken unconditionally.
      d_b_(i) = d_b_(i) + config_.lowpass_alpha(i) * (raw_(i) - d_b_(i));
      median_(i) = raw_(i);
      d_e_(i) = d_b_(i);
      d_est_(i) = d_b_(i);
      continue;
    }
    auto& hist = history_[i];
    hist.push_back(raw_(i));
    if (static_cast<int>(hist.size()) > config_.median_window) {
      hist.pop_front();
    }
    median_(i) = median_filter(hist);
    d_b_(i) = gated_lowpass(d_b_(i), raw_(i), median_(i),
                            config_.residual_threshold(i),
                            config_.lowpass_alpha(i));
    d_e_(i) = ema_filter(d_e_(i), raw_(i), config_.ema_beta(i));
    d_est_(i) = fuse(d_b_(i), d_e_(i), config_.fusion_weight);
  }
}

void HybridObserver::reset() {
  for (auto& h : history_) h.clear();
  raw_.setZero();
  median_.setZero();
  d_b_.setZero();
  d_e_.setZero();
  d_est_.setZero();
}

}  // namespace ctph
