#include "ctph/eval/disturbance.hpp"

#include <cmath>
#include <stdexcept>

namespace ctph {

DisturbanceKind disturbance_from_name(const std::string& name) {
  if (name == "none") return DisturbanceKind::none;
  if (name == "d1") return DisturbanceKind::wind_d1;
  if (name == "d2") return DisturbanceKind::wind_d2;
  if (name == "d3") return DisturbanceKind::wind_d3;
  if (name == "dz") return DisturbanceKind::dz_bench;
  if (name == "dpsi") return DisturbanceKind::dpsi_bench;
  throw std::invalid_argument("unknown disturbance: " + name);
}

const char* disturbance_name(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::none: return "none";
    case DisturbanceKind::wind_d1: return "d1";
    case DisturbanceKind::wind_d2: return "d2";
    case DisturbanceKind::wind_d3: return "d3";
    case DisturbanceKind::dz_bench: return "dz";
    case DisturbanceKind::dpsi_bench: return "dpsi";
  }
  return "none";
}

DisturbanceModel::DisturbanceModel(DisturbanceKind kind, std::uint64_t seed,
                                   const DisturbanceConfig& cfg)
    : kind_(kind), cfg_(cfg), rng_(seed) {}

void DisturbanceModel::begin_episode(double duration) {
  pulses_.clear();
  sign_ = 1.0;
  if (kind_ != DisturbanceKind::dz_bench &&
      kind_ != DisturbanceKind::dpsi_bench) {
    return;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sign_ = u(rng_) < 0.5 ? -1.0 : 1.0;
  if (u(rng_) >= cfg_.pulse_probability) return;   // pulse-free episode

  const double amp = kind_ == DisturbanceKind::dz_bench
                         ? cfg_.pulse_force_amp
                         : cfg_.pulse_torque_amp;
  std::exponential_distribution<double> gap(cfg_.pulse_rate_hz);
  std::uniform_real_distribution<double> height(-amp, amp);
  double t = gap(rng_);
  while (t < duration) {
    pulses_.push_back({t, t + cfg_.pulse_width, height(rng_)});
    t += gap(rng_);
  }
}

double DisturbanceModel::pulse_sum(double t) const {
  double sum = 0.0;
  for (const Pulse& p : pulses_) {
    if (t >= p.start && t < p.end) sum += p.amplitude;
  }
  return sum;
}

DisturbanceWrench DisturbanceModel::at(double t) {
  DisturbanceWrench w;
  switch (kind_) {
    case DisturbanceKind::none:
      break;
    case DisturbanceKind::wind_d1: {
      const double v = 0.05 + 0.05 * std::sin(M_PI * t + M_PI / 3.0);
      w.force.setConstant(v);
      break;
    }
    case DisturbanceKind::wind_d2: {
      const double v = 0.05 * std::sin(M_PI * t / 4.0) +
                       0.05 * std::sin(M_PI * t + M_PI / 3.0);
      w.force.setConstant(v);
      break;
    }
    case DisturbanceKind::wind_d3: {
      std::normal_distribution<double> n(0.0, cfg_.wind_noise_std);
      const double v = 0.05 * std::sin(M_PI * t + M_PI / 3.0);
      w.force = Eigen::Vector3d{v + n(rng_), v + n(rng_), v + n(rng_)};
      break;
    }
    case DisturbanceKind::dz_bench: {
      std::normal_distribution<double> n(0.0, cfg_.dz_noise_std);
      const double a = cfg_.dz_amplitude;
      w.force.z() =
          pulse_sum(t) + sign_ * (a + a * std::sin(M_PI * t) + n(rng_));
      break;
    }
    case DisturbanceKind::dpsi_bench: {
      std::normal_distribution<double> n(0.0, cfg_.dpsi_noise_std);
      const double a = cfg_.dpsi_amplitude;
      w.torque.z() = pulse_sum(t) + sign_ * (a + a * std::sin(M_PI * t)) +
                     sign_ * n(rng_);
      break;
    }
  }
  return w;
}

}  // namespace ctph
