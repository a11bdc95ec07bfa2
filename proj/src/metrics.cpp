#include "ctph/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctph {

double rmsne(const std::vector<double>& errors, double initial_error,
             double epsilon0) {
  const auto n = errors.size();
  if (n < 2) throw std::invalid_argument("rmsne needs at least two samples");
  // 1-based t = N/2 .. N inclusive.
  const std::size_t first = (n + 1) / 2;  // 1-based start index
  double sum = 0.0;
  for (std::size_t t = first; t <= n; ++t) {
    const double ratio = errors[t - 1] / (initial_error + epsilon0);
    sum += ratio * ratio;
  }
  return std::sqrt(2.0 * sum / static_cast<double>(n));
}

AxisStepMetrics axis_step_metrics(const std::vector<double>& position,
                                  double target, const MetricsConfig& cfg) {
  if (position.empty()) {
    throw std::invalid_argument("axis_step_metrics on an empty run");
  }
  AxisStepMetrics out;

  const auto n = position.size();
  const auto steady =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::floor(cfg.steady_fraction *
                                              static_cast<double>(n))));
  double acc = 0.0;
  for (std::size_t k = n - steady; k < n; ++k) {
    acc += std::abs(position[k] - target);
  }
  out.sse = acc / static_cast<double>(steady);

  const double mark = std::abs(target);
  double t10 = -1.0, t90 = -1.0;
  double max_abs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = std::abs(position[k]);
    max_abs = std::max(max_abs, p);
    if (t10 < 0.0 && p >= 0.1 * mark) t10 = static_cast<double>(k) * cfg.dt;
    if (t90 < 0.0 && p >= 0.9 * mark) t90 = static_cast<double>(k) * cfg.dt;
  }
  if (t10 >= 0.0 && t90 >= 0.0) {
    out.rise_time = t90 - t10;
  } else {
    out.rise_time = static_cast<double>(n) * cfg.dt;
    out.rise_valid = false;
  }
  out.overshoot = (max_abs - mark) / (mark + cfg.epsilon_p);
  return out;
}

ErrorStats rmse_mae(const std::vector<double>& errors) {
  if (errors.empty()) throw std::invalid_argument("rmse_mae on empty series");
  ErrorStats s;
  s.min_abs = std::abs(errors.front());
  for (const double e : errors) {
    s.rmse += e * e;
    s.mae += std::abs(e);
    s.max_abs = std::max(s.max_abs, std::abs(e));
    s.min_abs = std::min(s.min_abs, std::abs(e));
  }
  const auto n = static_cast<double>(errors.size());
  s.rmse = std::sqrt(s.rmse / n);
  s.mae /= n;
  return s;
}

LatencyResult tracking_latency(const std::vector<Eigen::Vector3d>& actual,
                               const std::vector<Eigen::Vector3d>& reference,
                               int window, double dt) {
  if (actual.size() != reference.size()) {
    throw std::invalid_argument("latency series length mismatch");
  }
  if (window < 1 || static_cast<std::size_t>(window) >= actual.size()) {
    throw std::invalid_argument("latency window out of range");
  }
  LatencyResult out;
  for (std::size_t t = static_cast<std::size_t>(window); t < actual.size();
       ++t) {
    std::size_t best = t - static_cast<std::size_t>(window);
    double best_dist = (actual[t] - reference[best]).norm();
    for (std::size_t k = best + 1; k < t; ++k) {
      const double d = (actual[t] - reference[k]).norm();
      if (d <= best_dist) {  // ties resolve to the largest K
        best_dist = d;
        best = k;
      }
    }
    out.series.push_back(static_cast<double>(t - best) * dt);
  }
  double sum = 0.0;
  for (const double v : out.series) sum += v;
  out.average = out.series.empty() ? 0.0 : sum / out.series.size();
  return out;
}

}  // namespace ctph
