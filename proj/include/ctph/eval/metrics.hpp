#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ctph {

struct MetricsConfig {
  double epsilon0 = 1e-6;        ///< RMSNE normalization constant
  double epsilon_p = 1e-6;       ///< overshoot denominator constant
  double steady_fraction = 0.2;  ///< final fraction forming the SSE index set
  int latency_window = 100;      ///< W [steps]
  double dt = 0.01;              ///< sampling period [s]
};

/// Root mean square normalized error over the latter half of an episode:
/// sqrt((2/N) * sum_{t=N/2..N} (e_t/(e_i + eps0))^2) with 1-based indexing.
double rmsne(const std::vector<double>& errors, double initial_error,
             double epsilon0 = 1e-6);

/// Step-response quality of one axis: steady-state error over the final
/// samples, 10%-to-90% rise time (first crossings of |P| against |P_d|),
/// and the overshoot ratio (max|P| - |P_d|)/(|P_d| + eps_p).
struct AxisStepMetrics {
  double sse = 0.0;
  double rise_time = 0.0;
  double overshoot = 0.0;
  bool rise_valid = true;  ///< false when a crossing never happens
};

AxisStepMetrics axis_step_metrics(const std::vector<double>& position,
                                  double target, const MetricsConfig& cfg);

struct ErrorStats {
  double rmse = 0.0;
  double mae = 0.0;
  double max_abs = 0.0;
  double min_abs = 0.0;
};

ErrorStats rmse_mae(const std::vector<double>& errors);

/// Tracking latency L(T) = (T - argmin_{K in [T-W, T)} ||p(T) - p_d(K)||) dt
/// for every T >= W, ties broken toward the largest K.
struct LatencyResult {
  std::vector<double> series;  ///< seconds, one entry per valid T
  double average = 0.0;
};

LatencyResult tracking_latency(const std::vector<Eigen::Vector3d>& actual,
                               const std::vector<Eigen::Vector3d>& reference,
                               int window, double dt);

}  // namespace ctph
