#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctph/sim/types.hpp"

namespace ctph {

enum class DisturbanceKind {
  none,
  wind_d1,    // 0.05 + 0.05 sin(pi t + pi/3)
  wind_d2,    // 0.05 sin(pi t / 4) + 0.05 sin(pi t + pi/3)
  wind_d3,    // N(0, 0.03^2) + 0.05 sin(pi t + pi/3)
  dz_bench,   // vertical-force test signal with pulse train and sign factor
  dpsi_bench  // yaw-torque test signal with pulse train and sign factor
};

DisturbanceKind disturbance_from_name(const std::string& name);
const char* disturbance_name(DisturbanceKind kind);

struct DisturbanceConfig {
  // Wind models (Earth-frame force, applied equally to all three axes with
  // independent noise draws per axis for the stochastic component).
  double wind_noise_std = 0.03;
  // Bench signals: s * (A + A sin(pi t) + noise) with per-episode sign s.
  double dz_amplitude = 0.05;      // N
  double dpsi_amplitude = 0.0005;  // N m
  double dz_noise_std = 0.05;
  double dpsi_noise_std = 0.0002;
  // Pulse process shared by both bench signals: present in an episode with
  // probability 1/2, Poisson arrivals, fixed width, uniform amplitude.
  double pulse_probability = 0.5;
  double pulse_rate_hz = 1.0;
  double pulse_width = 0.05;           // s
  double pulse_force_amp = 0.2;        // N, dz pulses ~ U(-amp, amp)
  double pulse_torque_amp = 0.002;     // N m, dpsi pulses ~ U(-amp, amp)
};

/// Stateful disturbance generator. begin_episode() draws the per-episode
/// randomness (sign factor, pulse train); at() must then be called once per
/// simulation step with non-decreasing time because the noise terms consume
/// the RNG stream.
class DisturbanceModel {
 public:
  DisturbanceModel(DisturbanceKind kind, std::uint64_t seed,
                   const DisturbanceConfig& cfg = {});

  /// Redraws sign factor and pulse schedule for an episode of `duration` s.
  void begin_episode(double duration);

  DisturbanceWrench at(double t);

  DisturbanceKind kind() const { return kind_; }
  double sign() const { return sign_; }

 private:
  struct Pulse {
    double start, end, amplitude;
  };

  double pulse_sum(double t) const;

  DisturbanceKind kind_;
  DisturbanceConfig cfg_;
  std::mt19937_64 rng_;
  double sign_ = 1.0;
  std::vector<Pulse> pulses_;
};

}  // namespace ctph
