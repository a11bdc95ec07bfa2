#include "ctph/io/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "ctph/io/csv.hpp"

namespace ctph {
namespace {

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

long long parse_integer(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

/// One configuration key bound to a field of ExperimentConfig.
struct Binding {
  std::string key;
  std::function<std::string(ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename Ref>  // Ref: ExperimentConfig& -> double&
Binding real_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) { return format_number(ref(c)); },
          [ref](ExperimentConfig& c, const std::string& s) {
            ref(c) = parse_real(s);
          }};
}

template <typename Ref>  // Ref: ExperimentConfig& -> int&
Binding int_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) { return std::to_string(ref(c)); },
          [ref](ExperimentConfig& c, const std::string& s) {
            ref(c) = static_cast<int>(parse_integer(s));
          }};
}

template <typename Ref>  // Ref: ExperimentConfig& -> long&
Binding long_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) { return std::to_string(ref(c)); },
          [ref](ExperimentConfig& c, const std::string& s) {
            ref(c) = static_cast<long>(parse_integer(s));
          }};
}

template <typename Ref>  // Ref: ExperimentConfig& -> std::size_t&
Binding size_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) { return std::to_string(ref(c)); },
          [ref](ExperimentConfig& c, const std::string& s) {
            const long long v = parse_integer(s);
            if (v < 0) throw std::invalid_argument("must be non-negative");
            ref(c) = static_cast<std::size_t>(v);
          }};
}

template <typename Ref>  // Ref: ExperimentConfig& -> bool&
Binding bool_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) {
            return std::string(ref(c) ? "true" : "false");
          },
          [ref](ExperimentConfig& c, const std::string& s) {
            ref(c) = parse_bool(s);
          }};
}

template <typename Ref>  // Ref: ExperimentConfig& -> std::filesystem::path&
Binding path_key(std::string key, Ref ref) {
  return {std::move(key),
          [ref](ExperimentConfig& c) { return ref(c).string(); },
          [ref](ExperimentConfig& c, const std::string& s) { ref(c) = s; }};
}

std::vector<Binding> bindings() {
  std::vector<Binding> b;
  auto C = [](ExperimentConfig& c) -> ExperimentConfig& { return c; };
  (void)C;

  // sim.*
  b.push_back(real_key("sim.mass", [](auto& c) -> double& { return c.params.mass; }));
  b.push_back(real_key("sim.gravity", [](auto& c) -> double& { return c.params.gravity; }));
  b.push_back(real_key("sim.arm_length", [](auto& c) -> double& { return c.params.arm_length; }));
  b.push_back(real_key("sim.inertia_x", [](auto& c) -> double& { return c.params.inertia_x; }));
  b.push_back(real_key("sim.inertia_y", [](auto& c) -> double& { return c.params.inertia_y; }));
  b.push_back(real_key("sim.inertia_z", [](auto& c) -> double& { return c.params.inertia_z; }));
  b.push_back(real_key("sim.thrust_coeff", [](auto& c) -> double& { return c.params.thrust_coeff; }));
  b.push_back(real_key("sim.torque_coeff", [](auto& c) -> double& { return c.params.torque_coeff; }));
  b.push_back(real_key("sim.max_motor_speed", [](auto& c) -> double& { return c.params.max_motor_speed; }));
  b.push_back(real_key("sim.divergence_bound", [](auto& c) -> double& { return c.params.divergence_bound; }));

  // pid.*
  b.push_back(real_key("pid.height_kp", [](auto& c) -> double& { return c.cascade.height_gains.kp; }));
  b.push_back(real_key("pid.height_ki", [](auto& c) -> double& { return c.cascade.height_gains.ki; }));
  b.push_back(real_key("pid.height_kd", [](auto& c) -> double& { return c.cascade.height_gains.kd; }));
  b.push_back(real_key("pid.height_integral_limit", [](auto& c) -> double& { return c.cascade.height_gains.integral_limit; }));
  b.push_back(real_key("pid.attitude_kp", [](auto& c) -> double& { return c.cascade.attitude_gains.kp; }));
  b.push_back(real_key("pid.attitude_ki", [](auto& c) -> double& { return c.cascade.attitude_gains.ki; }));
  b.push_back(real_key("pid.attitude_kd", [](auto& c) -> double& { return c.cascade.attitude_gains.kd; }));
  b.push_back(real_key("pid.attitude_integral_limit", [](auto& c) -> double& { return c.cascade.attitude_gains.integral_limit; }));
  b.push_back(real_key("pid.tilt_limit", [](auto& c) -> double& { return c.cascade.tilt_limit; }));
  b.push_back(real_key("pid.max_angular_accel", [](auto& c) -> double& { return c.cascade.max_angular_accel; }));

  // hdob.*
  b.push_back(int_key("hdob.median_window", [](auto& c) -> int& { return c.cascade.observer.median_window; }));
  b.push_back(real_key("hdob.fusion_weight", [](auto& c) -> double& { return c.cascade.observer.fusion_weight; }));
  static const char* chan[4] = {"fz", "mx", "my", "mz"};
  for (int i = 0; i < 4; ++i) {
    b.push_back(real_key(std::string("hdob.delta_") + chan[i],
                         [i](auto& c) -> double& { return c.cascade.observer.residual_threshold[i]; }));
    b.push_back(real_key(std::string("hdob.alpha_") + chan[i],
                         [i](auto& c) -> double& { return c.cascade.observer.lowpass_alpha[i]; }));
    b.push_back(real_key(std::string("hdob.beta_") + chan[i],
                         [i](auto& c) -> double& { return c.cascade.observer.ema_beta[i]; }));
  }

  // td3.*
  b.push_back(real_key("td3.gamma", [](auto& c) -> double& { return c.td3.gamma; }));
  b.push_back(real_key("td3.tau", [](auto& c) -> double& { return c.td3.tau; }));
  b.push_back(int_key("td3.policy_delay", [](auto& c) -> int& { return c.td3.policy_delay; }));
  b.push_back(size_key("td3.batch_size", [](auto& c) -> std::size_t& { return c.td3.batch_size; }));
  b.push_back(real_key("td3.exploration_noise", [](auto& c) -> double& { return c.td3.exploration_noise; }));
  b.push_back(real_key("td3.smoothing_noise", [](auto& c) -> double& { return c.td3.smoothing_noise; }));
  b.push_back(real_key("td3.smoothing_clip", [](auto& c) -> double& { return c.td3.smoothing_clip; }));
  b.push_back(real_key("td3.accel_limit", [](auto& c) -> double& { return c.td3.accel_limit; }));
  b.push_back(int_key("td3.episodes", [](auto& c) -> int& { return c.td3.episodes; }));
  b.push_back(int_key("td3.steps_per_episode", [](auto& c) -> int& { return c.td3.steps_per_episode; }));
  b.push_back(real_key("td3.actor_lr_initial", [](auto& c) -> double& { return c.td3.actor_lr.initial; }));
  b.push_back(real_key("td3.actor_lr_final", [](auto& c) -> double& { return c.td3.actor_lr.final; }));
  b.push_back(int_key("td3.actor_lr_hold", [](auto& c) -> int& { return c.td3.actor_lr.hold_episodes; }));
  b.push_back(int_key("td3.actor_lr_decay", [](auto& c) -> int& { return c.td3.actor_lr.decay_episodes; }));
  b.push_back(real_key("td3.critic_lr_initial", [](auto& c) -> double& { return c.td3.critic_lr.initial; }));
  b.push_back(real_key("td3.critic_lr_final", [](auto& c) -> double& { return c.td3.critic_lr.final; }));
  b.push_back(int_key("td3.critic_lr_hold", [](auto& c) -> int& { return c.td3.critic_lr.hold_episodes; }));
  b.push_back(int_key("td3.critic_lr_decay", [](auto& c) -> int& { return c.td3.critic_lr.decay_episodes; }));
  b.push_back(bool_key("td3.normalize_obs", [](auto& c) -> bool& { return c.td3.normalize_obs; }));
  b.push_back(bool_key("td3.use_dual_replay", [](auto& c) -> bool& { return c.td3.use_dual_replay; }));
  b.push_back(bool_key("td3.use_expert", [](auto& c) -> bool& { return c.td3.use_expert; }));
  b.push_back(bool_key("td3.adaptive_fusion", [](auto& c) -> bool& { return c.td3.adaptive_fusion; }));
  b.push_back(int_key("td3.critic_count", [](auto& c) -> int& { return c.td3.critic_count; }));

  // reward.* / fusion.* / schedule.* / replay.*
  b.push_back(real_key("reward.beta1", [](auto& c) -> double& { return c.td3.reward.beta1; }));
  b.push_back(real_key("reward.beta2", [](auto& c) -> double& { return c.td3.reward.beta2; }));
  b.push_back(real_key("reward.beta3", [](auto& c) -> double& { return c.td3.reward.beta3; }));
  b.push_back(real_key("reward.bonus_radius", [](auto& c) -> double& { return c.td3.reward.bonus_radius; }));
  b.push_back(real_key("fusion.alpha_min", [](auto& c) -> double& { return c.td3.fusion.alpha_min; }));
  b.push_back(real_key("fusion.alpha_max", [](auto& c) -> double& { return c.td3.fusion.alpha_max; }));
  b.push_back(real_key("fusion.sigma_th", [](auto& c) -> double& { return c.td3.fusion.sigma_th; }));
  b.push_back(real_key("fusion.fixed_alpha", [](auto& c) -> double& { return c.td3.fusion.fixed_alpha; }));
  b.push_back(long_key("schedule.t0", [](auto& c) -> long& { return c.td3.schedule.t0; }));
  b.push_back(real_key("schedule.beta", [](auto& c) -> double& { return c.td3.schedule.beta; }));
  b.push_back(real_key("schedule.kappa", [](auto& c) -> double& { return c.td3.schedule.kappa; }));
  b.push_back(real_key("schedule.k", [](auto& c) -> double& { return c.td3.schedule.k; }));
  b.push_back(long_key("schedule.xi_ramp_steps", [](auto& c) -> long& { return c.td3.schedule.xi_ramp_steps; }));
  b.push_back(size_key("replay.main_capacity", [](auto& c) -> std::size_t& { return c.td3.replay.main_capacity; }));
  b.push_back(size_key("replay.high_capacity", [](auto& c) -> std::size_t& { return c.td3.replay.high_capacity; }));
  b.push_back(size_key("replay.window_length", [](auto& c) -> std::size_t& { return c.td3.replay.window_length; }));
  b.push_back(size_key("replay.warmup_length", [](auto& c) -> std::size_t& { return c.td3.replay.warmup_length; }));
  b.push_back(real_key("replay.rho", [](auto& c) -> double& { return c.td3.replay.rho; }));
  b.push_back(real_key("replay.epsilon", [](auto& c) -> double& { return c.td3.replay.epsilon; }));
  b.push_back(size_key("replay.high_batch_share", [](auto& c) -> std::size_t& { return c.td3.replay.high_batch_share; }));

  // metrics.*
  b.push_back(real_key("metrics.epsilon0", [](auto& c) -> double& { return c.metrics.epsilon0; }));
  b.push_back(real_key("metrics.epsilon_p", [](auto& c) -> double& { return c.metrics.epsilon_p; }));
  b.push_back(real_key("metrics.steady_fraction", [](auto& c) -> double& { return c.metrics.steady_fraction; }));
  b.push_back(int_key("metrics.latency_window", [](auto& c) -> int& { return c.metrics.latency_window; }));

  // dist.*
  b.push_back(real_key("dist.wind_noise_std", [](auto& c) -> double& { return c.wind.wind_noise_std; }));
  b.push_back(real_key("dist.dz_amplitude", [](auto& c) -> double& { return c.wind.dz_amplitude; }));
  b.push_back(real_key("dist.dpsi_amplitude", [](auto& c) -> double& { return c.wind.dpsi_amplitude; }));
  b.push_back(real_key("dist.dz_noise_std", [](auto& c) -> double& { return c.wind.dz_noise_std; }));
  b.push_back(real_key("dist.dpsi_noise_std", [](auto& c) -> double& { return c.wind.dpsi_noise_std; }));
  b.push_back(real_key("dist.pulse_probability", [](auto& c) -> double& { return c.wind.pulse_probability; }));
  b.push_back(real_key("dist.pulse_rate_hz", [](auto& c) -> double& { return c.wind.pulse_rate_hz; }));
  b.push_back(real_key("dist.pulse_width", [](auto& c) -> double& { return c.wind.pulse_width; }));
  b.push_back(real_key("dist.pulse_force_amp", [](auto& c) -> double& { return c.wind.pulse_force_amp; }));
  b.push_back(real_key("dist.pulse_torque_amp", [](auto& c) -> double& { return c.wind.pulse_torque_amp; }));

  // run.*
  b.push_back({"run.scenario",
               [](ExperimentConfig& c) { return c.scenario; },
               [](ExperimentConfig& c, const std::string& s) { c.scenario = s; }});
  b.push_back({"run.variant",
               [](ExperimentConfig& c) { return std::string(variant_name(c.variant)); },
               [](ExperimentConfig& c, const std::string& s) {
                 c.variant = variant_from_name(s);
                 // The variant is shorthand for the four ablation switches;
                 // explicit td3.* keys (sorted after run.*) still override.
                 c.td3.apply_variant(c.variant);
               }});
  b.push_back({"run.trajectory",
               [](ExperimentConfig& c) { return std::string(trajectory_name(c.trajectory)); },
               [](ExperimentConfig& c, const std::string& s) { c.trajectory = trajectory_from_name(s); }});
  b.push_back({"run.controller",
               [](ExperimentConfig& c) { return c.controller; },
               [](ExperimentConfig& c, const std::string& s) { c.controller = s; }});
  b.push_back({"run.track_trajectory",
               [](ExperimentConfig& c) { return c.track_trajectory; },
               [](ExperimentConfig& c, const std::string& s) { c.track_trajectory = s; }});
  b.push_back({"run.track_disturbance",
               [](ExperimentConfig& c) { return c.track_disturbance; },
               [](ExperimentConfig& c, const std::string& s) { c.track_disturbance = s; }});
  b.push_back({"run.disturbance",
               [](ExperimentConfig& c) { return std::string(disturbance_name(c.disturbance)); },
               [](ExperimentConfig& c, const std::string& s) { c.disturbance = disturbance_from_name(s); }});
  b.push_back({"run.seeds",
               [](ExperimentConfig& c) {
                 std::string out;
                 for (std::size_t i = 0; i < c.seeds.size(); ++i) {
                   if (i) out += ',';
                   out += std::to_string(c.seeds[i]);
                 }
                 return out;
               },
               [](ExperimentConfig& c, const std::string& s) {
                 c.seeds.clear();
                 std::stringstream stream(s);
                 std::string item;
                 while (std::getline(stream, item, ',')) {
                   const long long v = parse_integer(item);
                   if (v < 0) throw std::invalid_argument("seed must be non-negative");
                   c.seeds.push_back(static_cast<std::uint64_t>(v));
                 }
               }});
  b.push_back(path_key("run.out", [](auto& c) -> std::filesystem::path& { return c.out_dir; }));
  b.push_back(path_key("run.checkpoints", [](auto& c) -> std::filesystem::path& { return c.checkpoints; }));
  b.push_back(path_key("run.replay_input", [](auto& c) -> std::filesystem::path& { return c.replay_input; }));
  b.push_back(real_key("run.dt", [](auto& c) -> double& { return c.dt; }));
  b.push_back(real_key("run.bench_duration", [](auto& c) -> double& { return c.bench_duration; }));
  b.push_back(int_key("run.bench_episodes", [](auto& c) -> int& { return c.bench_episodes; }));
  b.push_back(int_key("run.p2p_targets", [](auto& c) -> int& { return c.p2p_targets; }));
  b.push_back(int_key("run.p2p_steps", [](auto& c) -> int& { return c.p2p_steps; }));
  b.push_back(real_key("run.track_laps", [](auto& c) -> double& { return c.track_laps; }));
  b.push_back(real_key("run.rescale_interval", [](auto& c) -> double& { return c.rescale_interval; }));
  b.push_back(real_key("run.rescale_fraction", [](auto& c) -> double& { return c.rescale_fraction; }));

  std::sort(b.begin(), b.end(),
            [](const Binding& x, const Binding& y) { return x.key < y.key; });
  return b;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

const char* kScenarios[] = {"train", "sweep-alpha", "hdob-bench", "p2p",
                            "track", "generalize", "replay"};

}  // namespace

void ExperimentConfig::finalize() {
  metrics.dt = dt;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&bad](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };

  require(std::any_of(std::begin(kScenarios), std::end(kScenarios),
                      [this](const char* s) { return scenario == s; }),
          "run.scenario: unknown scenario name");
  require(!seeds.empty(), "run.seeds: at least one seed required");
  {
    static const char* kControllers[] = {"all",    "pid",  "hdopid",
                                         "td3pid", "ctph", "oracle"};
    require(std::any_of(std::begin(kControllers), std::end(kControllers),
                        [this](const char* s) { return controller == s; }),
            "run.controller: unknown controller name");
    require(track_trajectory == "all" || track_trajectory == "ellipse" ||
                track_trajectory == "square",
            "run.track_trajectory: must be all, ellipse or square");
    require(track_disturbance == "all" || track_disturbance == "none" ||
                track_disturbance == "d1" || track_disturbance == "d2" ||
                track_disturbance == "d3",
            "run.track_disturbance: must be all, none, d1, d2 or d3");
  }
  require(dt > 0.0, "run.dt: must be positive");
  require(bench_duration > 0.0, "run.bench_duration: must be positive");
  require(bench_episodes > 0, "run.bench_episodes: must be positive");
  require(p2p_targets > 0, "run.p2p_targets: must be positive");
  require(p2p_steps >= 10, "run.p2p_steps: must be at least 10");
  require(track_laps > 0.0, "run.track_laps: must be positive");
  require(rescale_interval > 0.0, "run.rescale_interval: must be positive");
  require(rescale_fraction >= 0.0 && rescale_fraction < 1.0,
          "run.rescale_fraction: must lie in [0, 1)");

  require(cascade.height_gains.kp >= 0.0 && cascade.height_gains.ki >= 0.0 &&
              cascade.height_gains.kd >= 0.0,
          "pid.height_*: gains must be non-negative");
  require(cascade.attitude_gains.kp >= 0.0 && cascade.attitude_gains.ki >= 0.0 &&
              cascade.attitude_gains.kd >= 0.0,
          "pid.attitude_*: gains must be non-negative");
  require(cascade.tilt_limit > 0.0, "pid.tilt_limit: must be positive");
  require(cascade.max_angular_accel > 0.0,
          "pid.max_angular_accel: must be positive");

  require(metrics.epsilon0 > 0.0, "metrics.epsilon0: must be positive");
  require(metrics.epsilon_p > 0.0, "metrics.epsilon_p: must be positive");
  require(metrics.steady_fraction > 0.0 && metrics.steady_fraction <= 1.0,
          "metrics.steady_fraction: must lie in (0, 1]");
  require(metrics.latency_window >= 1, "metrics.latency_window: must be >= 1");

  require(wind.wind_noise_std >= 0.0 && wind.dz_noise_std >= 0.0 &&
              wind.dpsi_noise_std >= 0.0,
          "dist.*_noise_std: must be non-negative");
  require(wind.dz_amplitude >= 0.0 && wind.dpsi_amplitude >= 0.0,
          "dist.*_amplitude: must be non-negative");
  require(wind.pulse_probability >= 0.0 && wind.pulse_probability <= 1.0,
          "dist.pulse_probability: must lie in [0, 1]");
  require(wind.pulse_rate_hz > 0.0, "dist.pulse_rate_hz: must be positive");
  require(wind.pulse_width > 0.0, "dist.pulse_width: must be positive");
  require(wind.pulse_force_amp >= 0.0 && wind.pulse_torque_amp >= 0.0,
          "dist.pulse_*_amp: must be non-negative");

  try {
    params.validate();
  } catch (const std::exception& e) {
    bad.emplace_back(std::string("sim: ") + e.what());
  }
  try {
    cascade.observer.validate();
  } catch (const std::exception& e) {
    bad.emplace_back(std::string("hdob: ") + e.what());
  }
  try {
    td3.validate();
  } catch (const std::exception& e) {
    bad.emplace_back(std::string("td3: ") + e.what());
  }

  if (!bad.empty()) {
    std::string msg = "configuration invalid:";
    for (const auto& item : bad) msg += "\n  - " + item;
    throw ConfigError(msg);
  }
}

std::string ExperimentConfig::echo() const {
  ExperimentConfig copy = *this;
  std::string out;
  for (const Binding& binding : bindings()) {
    out += binding.key;
    out += " = ";
    out += binding.get(copy);
    out += '\n';
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  ExperimentConfig cfg;
  const auto table = bindings();
  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto at = [&](const std::string& what) {
      return ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
    };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw at("expected 'key = value'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) throw at("empty key");

    const auto it = std::lower_bound(
        table.begin(), table.end(), key,
        [](const Binding& b, const std::string& k) { return b.key < k; });
    if (it == table.end() || it->key != key) {
      throw at("unknown key '" + key + "'");
    }
    try {
      it->set(cfg, value);
    } catch (const std::exception& e) {
      throw at("invalid value for '" + key + "': " + e.what());
    }
  }
  cfg.finalize();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open configuration file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace ctph
