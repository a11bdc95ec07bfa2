#pragma once

#include <array>
#include <deque>

#include "ctph/sim/types.hpp"

namespace ctph {

/// Observer channel indices: vertical force residual plus the three
/// body-torque residuals.
enum HdobChannel { kChanFz = 0, kChanMx = 1, kChanMy = 2, kChanMz = 3 };

/// Filter-chain parameters, one entry per channel in HdobChannel order.
struct HdobConfig {
  int median_window = 5;  ///< N, odd and >= 3
  Eigen::Vector4d residual_threshold{0.4, 0.01, 0.01, 0.01};  ///< delta_x
  Eigen::Vector4d lowpass_alpha{0.24, 0.4, 0.4, 0.4};         ///< alpha_x
  Eigen::Vector4d ema_beta{0.96, 0.955, 0.955, 0.955};        ///< beta_x
  double fusion_weight = 0.45;  ///< lambda_d in [0, 1]

  void validate() const;
};

/// Raw wrench-residual estimates from backward-differenced velocities:
///   f_hat_d,z = m a_hat_z - (f_u,z - m g), with f_u,z the Earth-frame
///               vertical component of the applied thrust
///   M_hat_d   = I w_dot_hat + omega x (I omega) - M_u
/// Returned in HdobChannel order.
Eigen::Vector4d raw_estimate(const QuadrotorState& prev,
                             const QuadrotorState& now, const Wrench& applied,
                             double dt, const QuadrotorParams& params);

/// Median of the buffered raw estimates (any non-empty prefix of the window).
double median_filter(const std::deque<double>& buffer);

/// Residual-gated first-order low-pass: updates toward x_hat when
/// |x_hat - x_med| <= delta, otherwise holds the previous state.
double gated_lowpass(double d_b_prev, double x_hat, double x_med, double delta,
                     double alpha);

/// Exponential moving average d_e = beta d_e_prev + (1 - beta) x_hat.
double ema_filter(double d_e_prev, double x_hat, double beta);

/// Convex fusion d_est = lambda_d d_b + (1 - lambda_d) d_e.
double fuse(double d_b, double d_e, double lambda_d);

/// Disturbance-compensated inner-loop commands.
struct CompensatedCommand {
  double f_z = 0.0;  ///< m (g + a_z) - d_est^{f_z}
  Eigen::Vector3d angular_accel = Eigen::Vector3d::Zero();  ///< M_i^d/I_i - d_est^{M_i}/I_i
};

/// Applies the per-channel estimates to the altitude and attitude commands.
CompensatedCommand compensate(double a_z, const Eigen::Vector3d& m_d,
                              const Eigen::Vector4d& d_est,
                              const QuadrotorParams& params);

/// Stateful observer driving the full per-channel chain:
/// raw residual -> median -> (gated low-pass || EMA) -> convex fusion.
///
/// Mode::lowpass_only degrades the chain to a single un-gated first-order
/// low-pass on the raw estimate — the conventional-DOB comparator used by the
/// observer benchmark.
class HybridObserver {
 public:
  enum class Mode { hybrid, lowpass_only };

  HybridObserver(const HdobConfig& config, const QuadrotorParams& params,
                 Mode mode = Mode::hybrid);

  /// Digests one transition driven by the actually-applied wrench.
  void update(const QuadrotorState& prev, const QuadrotorState& now,
              const Wrench& applied, double dt);

  /// Latest fused estimate per channel (zeros before the first update).
  const Eigen::Vector4d& estimate() const { return d_est_; }

  // Per-channel telemetry for logging.
  const Eigen::Vector4d& raw() const { return raw_; }
  const Eigen::Vector4d& median() const { return median_; }
  const Eigen::Vector4d& lowpass() const { return d_b_; }
  const Eigen::Vector4d& ema() const { return d_e_; }

  void reset();

 private:
  HdobConfig config_;
  QuadrotorParams params_;
  Mode mode_;
  std::array<std::deque<double>, 4> history_;
  Eigen::Vector4d raw_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d median_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d d_b_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d d_e_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d d_est_ = Eigen::Vector4d::Zero();
};

}  // namespace ctph
