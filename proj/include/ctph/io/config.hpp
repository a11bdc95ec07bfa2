#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctph/control/cascade.hpp"
#include "ctph/eval/disturbance.hpp"
#include "ctph/eval/metrics.hpp"
#include "ctph/eval/trajectory.hpp"
#include "ctph/sim/types.hpp"
#include "ctph/td3/config.hpp"

namespace ctph {

/// Raised by the configuration layer; parse failures carry file:line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything one experiment run needs. Field defaults reproduce the
/// benchmark vehicle and hyperparameter tables, so an empty configuration
/// file selects the reference setup.
struct ExperimentConfig {
  // Run selection. The scenario normally comes from the CLI subcommand.
  std::string scenario = "train";
  Td3Variant variant = Td3Variant::ctph;
  TrajectoryKind trajectory = TrajectoryKind::ellipse;
  DisturbanceKind disturbance = DisturbanceKind::none;
  std::string controller = "all";          ///< eval arm, or "all" for the grid
  std::string track_trajectory = "all";    ///< track grid filter
  std::string track_disturbance = "all";   ///< track grid filter
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path out_dir = "runs";
  std::filesystem::path checkpoints;   ///< trained actors for eval scenarios
  std::filesystem::path replay_input;  ///< traj.csv for the replay scenario

  // Scenario shape.
  double dt = 0.01;
  double bench_duration = 7.5;    ///< hdob-bench episode length [s]
  int bench_episodes = 200;       ///< hdob-bench episodes per condition
  int p2p_targets = 10;
  int p2p_steps = 1000;
  double track_laps = 2.0;
  double rescale_interval = 3.0;  ///< generalize: model redraw period [s]
  double rescale_fraction = 0.3;  ///< generalize: +-30% mass/inertia

  // Module configurations.
  QuadrotorParams params;
  CascadeConfig cascade;
  Td3Config td3;
  MetricsConfig metrics;
  DisturbanceConfig wind;

  /// Cross-field resolution (sampling periods track dt). Loaders call this.
  void finalize();
  /// Throws ConfigError listing every violated named constraint.
  void validate() const;
  /// The resolved configuration as sorted `key = value` lines. Parsing the
  /// echo reproduces this configuration exactly.
  std::string echo() const;
};

/// Strict `key = value` parser: '#' starts a comment, blank lines are
/// skipped, unknown keys and malformed values are rejected with the
/// offending line number.
ExperimentConfig parse_config(std::string_view text,
                              const std::string& origin = "<inline>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ctph
