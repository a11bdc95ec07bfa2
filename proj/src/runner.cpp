#include "ctph/io/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ctph/eval/disturbance.hpp"
#include "ctph/eval/metrics.hpp"
#include "ctph/eval/trajectory.hpp"
#include "ctph/io/csv.hpp"
#include "ctph/nn/checkpoint.hpp"
#include "ctph/sim/dynamics.hpp"
#include "ctph/sim/so3.hpp"
#include "ctph/td3/env.hpp"
#include "ctph/td3/expert.hpp"
#include "ctph/td3/trainer.hpp"

namespace ctph {
namespace {

namespace fs = std::filesystem;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  return seed ^ fnv1a(tag);
}

/// Writes the cell manifest: identity, content hash, artifact digests and the
/// fully resolved configuration.
void write_manifest(
    const fs::path& cell, const ExperimentConfig& cfg, const std::string& tag,
    std::uint64_t seed,
    std::vector<std::pair<std::string, std::uint64_t>> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  std::string listing;
  std::uint64_t combined = kFnvOffsetBasis;
  for (const auto& [name, digest] : artifacts) {
    const std::string line = name + " = " + to_hex(digest) + "\n";
    combined = fnv1a(line, combined);
    listing += line;
  }
  std::string body;
  body += "# run manifest\n";
  body += "scenario = " + cfg.scenario + "\n";
  body += "cell = " + tag + "/" + std::to_string(seed) + "\n";
  body += "seed = " + std::to_string(seed) + "\n";
  body += "content_hash = " + to_hex(combined) + "\n";
  body += "[artifacts]\n" + listing;
  body += "[config]\n" + cfg.echo();

  fs::create_directories(cell);
  std::ofstream out(cell / "manifest", std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write manifest in " + cell.string());
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

float eval_actor(const Mlp<float>& net, const Observation& obs) {
  const Eigen::Matrix<float, Eigen::Dynamic, 1> x = net_input(obs);
  const float a = forward(net, x)(0);
  return std::clamp(a, -1.0f, 1.0f);
}

/// Per-step flight log; the 20 columns mirror traj.csv.
struct FlightRecord {
  std::vector<std::array<double, 20>> rows;
  std::vector<double> ex, ey, ez;  ///< reference - actual, per axis
  std::vector<Eigen::Vector3d> actual, reference;
  bool diverged = false;
  double max_error = 0.0;
};

struct FlightSpec {
  ControllerKind controller = ControllerKind::pid;
  const ActorPair* actors = nullptr;  ///< required for td3pid / ctph
  TrajectoryRef ref = TrajectoryRef::point(Eigen::Vector3d::Zero());
  DisturbanceModel* dist = nullptr;
  int steps = 0;
  std::optional<Eigen::Vector3d> start;  ///< default: on the reference
  // generalize-scenario model redraws (interval <= 0 turns them off)
  double rescale_interval = 0.0;
  double rescale_fraction = 0.0;
  std::uint64_t rescale_seed = 0;
};

void log_sample(FlightRecord& rec, double ts, const QuadrotorState& state,
                const Wrench& wrench, const Eigen::Vector3d& dist_force,
                const TrajectoryRef& ref) {
  const Eigen::Vector3d euler = state.euler();
  const Eigen::Vector3d target = ref.position(ts);
  rec.rows.push_back({ts,
                      state.position.x(), state.position.y(), state.position.z(),
                      state.velocity.x(), state.velocity.y(), state.velocity.z(),
                      euler.x(), euler.y(), euler.z(),
                      state.angular_velocity.x(), state.angular_velocity.y(),
                      state.angular_velocity.z(),
                      wrench.thrust, wrench.torque.x(), wrench.torque.y(),
                      wrench.torque.z(),
                      dist_force.x(), dist_force.y(), dist_force.z()});
  rec.actual.push_back(state.position);
  rec.reference.push_back(target);
  const Eigen::Vector3d e = target - state.position;
  rec.ex.push_back(e.x());
  rec.ey.push_back(e.y());
  rec.ez.push_back(e.z());
  rec.max_error = std::max(rec.max_error, e.norm());
}

FlightRecord fly(const ExperimentConfig& cfg, const FlightSpec& spec) {
  FlightRecord rec;
  rec.rows.reserve(static_cast<std::size_t>(spec.steps));

  if (spec.controller == ControllerKind::oracle) {
    // Plumbing mock: the vehicle sits exactly on the reference each sample.
    for (int k = 0; k < spec.steps; ++k) {
      const double ts = (k + 1) * cfg.dt;
      QuadrotorState state;
      state.position = spec.ref.position(ts);
      state.velocity =
          (spec.ref.position(ts + cfg.dt) - spec.ref.position(ts)) / cfg.dt;
      state.rotation =
          rotation_from_euler({0.0, 0.0, spec.ref.yaw(ts)});
      log_sample(rec, ts, state, Wrench{}, Eigen::Vector3d::Zero(), spec.ref);
    }
    return rec;
  }

  const bool policy = spec.controller == ControllerKind::td3pid ||
                      spec.controller == ControllerKind::ctph;
  if (policy && spec.actors == nullptr) {
    throw std::runtime_error("policy controller needs trained actors");
  }

  CascadeConfig cc = cfg.cascade;
  cc.use_observer = spec.controller == ControllerKind::hdopid ||
                    spec.controller == ControllerKind::ctph;
  cc.observer_mode = HybridObserver::Mode::hybrid;
  HoverEnv env(cfg.params, cc, cfg.td3, cfg.dt);
  env.reset(spec.start.value_or(spec.ref.position(0.0)), spec.ref.position(0.0),
            spec.ref.yaw(0.0));

  std::mt19937_64 rescale_rng(spec.rescale_seed);
  double next_rescale = spec.rescale_interval > 0.0
                            ? spec.rescale_interval
                            : std::numeric_limits<double>::infinity();

  for (int k = 0; k < spec.steps; ++k) {
    const double t = k * cfg.dt;
    env.set_target(spec.ref.position(t), spec.ref.yaw(t));

    float ax = 0.0f, ay = 0.0f;
    if (policy) {
      ax = eval_actor(spec.actors->x, env.observe(Axis::x));
      ay = eval_actor(spec.actors->y, env.observe(Axis::y));
    } else {
      const Eigen::Vector3d e = env.target() - env.state().position;
      const Eigen::Vector3d& v = env.state().velocity;
      ax = static_cast<float>(expert_pd_action(e.x(), v.x()));
      ay = static_cast<float>(expert_pd_action(e.y(), v.y()));
    }

    const DisturbanceWrench d =
        spec.dist != nullptr ? spec.dist->at(t) : DisturbanceWrench{};
    const auto step = env.step(ax, ay, d);
    if (step.diverged) {
      rec.diverged = true;
      break;
    }
    const double ts = (k + 1) * cfg.dt;
    log_sample(rec, ts, env.state(), env.last_wrench(), d.force, spec.ref);

    if (ts + 1e-9 >= next_rescale) {
      env.set_true_params(
          randomize_inertia(cfg.params, spec.rescale_fraction, rescale_rng));
      next_rescale += spec.rescale_interval;
    }
  }
  return rec;
}

std::uint64_t write_traj(const fs::path& path, const FlightRecord& rec) {
  CsvWriter csv(path, {"t",  "x",  "y",  "z",  "vx", "vy", "vz",
                       "phi", "theta", "psi", "wx", "wy", "wz",
                       "f",  "Mx", "My", "Mz", "dfx", "dfy", "dfz"});
  for (const auto& r : rec.rows) {
    std::vector<CsvCell> cells;
    cells.reserve(r.size());
    for (double v : r) cells.emplace_back(v);
    csv.row(cells);
  }
  return csv.finish();
}

struct CellMetrics {
  ErrorStats x, y, z;
  double latency = kNan;
};

CellMetrics cell_metrics(const FlightRecord& rec, const MetricsConfig& mcfg) {
  CellMetrics m;
  if (rec.ex.empty()) return m;
  m.x = rmse_mae(rec.ex);
  m.y = rmse_mae(rec.ey);
  m.z = rmse_mae(rec.ez);
  if (static_cast<int>(rec.actual.size()) > mcfg.latency_window) {
    m.latency = tracking_latency(rec.actual, rec.reference,
                                 mcfg.latency_window, mcfg.dt)
                    .average;
  }
  return m;
}

const std::vector<std::string> kTrackHeader = {
    "controller", "trajectory", "disturbance", "seed",
    "rmse_x", "rmse_y", "rmse_z", "mae_x", "mae_y", "mae_z",
    "max_x", "max_y", "max_z", "latency_avg", "max_error", "diverged"};

std::vector<CsvCell> track_row(const std::string& controller,
                               const std::string& trajectory,
                               const std::string& disturbance,
                               std::uint64_t seed, const FlightRecord& rec,
                               const CellMetrics& m) {
  return {controller, trajectory, disturbance, seed,
          m.x.rmse, m.y.rmse, m.z.rmse, m.x.mae, m.y.mae, m.z.mae,
          m.x.max_abs, m.y.max_abs, m.z.max_abs, m.latency, rec.max_error,
          rec.diverged};
}

TrajectoryRef make_reference(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::point:
      return TrajectoryRef::point(Eigen::Vector3d::Zero());
    case TrajectoryKind::ellipse:
      return TrajectoryRef::ellipse();
    case TrajectoryKind::square:
      return TrajectoryRef::square();
  }
  return TrajectoryRef::point(Eigen::Vector3d::Zero());
}

double window_mean(const std::vector<EpisodeStats>& curves, std::size_t from,
                   std::size_t count, double EpisodeStats::* field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = from; i < from + count && i < curves.size(); ++i) {
    sum += curves[i].*field;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : kNan;
}

/// Trains one (config, seed) cell and writes curves, checkpoints, metrics
/// and the manifest. Shared by the train and sweep-alpha scenarios.
fs::path train_cell(const ExperimentConfig& cfg, const Td3Config& tcfg,
                    const std::string& scenario_dir, const std::string& tag,
                    std::uint64_t seed) {
  const fs::path cell =
      cfg.out_dir / scenario_dir / tag / std::to_string(seed);
  fs::create_directories(cell / "checkpoints");

  Trainer trainer(tcfg, cfg.params, cfg.cascade);
  const Trainer::Result result = trainer.run(seed);

  std::vector<std::pair<std::string, std::uint64_t>> artifacts;

  CsvWriter curves(cell / "curves.csv",
                   {"episode", "mean_reward", "rmsne", "alpha_mean",
                    "lambda_mean", "xi", "main_size", "high_size", "diverged"});
  for (const EpisodeStats& s : result.curves) {
    curves.row({s.episode, s.mean_reward, s.rmsne, s.alpha_mean, s.lambda_mean,
                s.xi, s.main_size, s.high_size, s.diverged});
  }
  artifacts.emplace_back("curves.csv", curves.finish());

  const std::size_t n = result.curves.size();
  const std::size_t window = std::min<std::size_t>(25, n);
  CsvWriter metrics(cell / "metrics.csv",
                    {"seed", "episodes", "expert_mse", "expert_converged",
                     "divergent_episodes", "first25_reward", "final25_reward",
                     "first25_rmsne", "final25_rmsne"});
  metrics.row({seed, n, result.expert_mse, result.expert_converged,
               result.divergent_episodes,
               window_mean(result.curves, 0, window, &EpisodeStats::mean_reward),
               window_mean(result.curves, n - window, window,
                           &EpisodeStats::mean_reward),
               window_mean(result.curves, 0, window, &EpisodeStats::rmsne),
               window_mean(result.curves, n - window, window,
                           &EpisodeStats::rmsne)});
  artifacts.emplace_back("metrics.csv", metrics.finish());

  for (const auto& [name, net] :
       {std::pair<const char*, const Mlp<float>*>{"actor_x.ckpt",
                                                  &result.actor_x},
        std::pair<const char*, const Mlp<float>*>{"actor_y.ckpt",
                                                  &result.actor_y}}) {
    const fs::path ckpt = cell / "checkpoints" / name;
    save_network(ckpt, *net);
    nlohmann::json meta{{"seed", seed},
                        {"episodes", n},
                        {"expert_mse", result.expert_mse},
                        {"expert_converged", result.expert_converged},
                        {"divergent_episodes", result.divergent_episodes}};
    std::ofstream side(ckpt.string() + ".json",
                       std::ios::binary | std::ios::trunc);
    side << meta.dump(2) << '\n';
    side.close();
    artifacts.emplace_back(std::string("checkpoints/") + name,
                           hash_file(ckpt));
    artifacts.emplace_back(std::string("checkpoints/") + name + ".json",
                           hash_file(ckpt.string() + ".json"));
  }

  write_manifest(cell, cfg, tag, seed, std::move(artifacts));
  return cell;
}

std::vector<ControllerKind> controller_set(const ExperimentConfig& cfg,
                                           std::vector<ControllerKind> all) {
  if (cfg.controller == "all") return all;
  return {controller_from_name(cfg.controller)};
}

bool needs_actors(const std::vector<ControllerKind>& set) {
  return std::any_of(set.begin(), set.end(), [](ControllerKind c) {
    return c == ControllerKind::td3pid || c == ControllerKind::ctph;
  });
}

}  // namespace

const char* controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::pid: return "pid";
    case ControllerKind::hdopid: return "hdopid";
    case ControllerKind::td3pid: return "td3pid";
    case ControllerKind::ctph: return "ctph";
    case ControllerKind::oracle: return "oracle";
  }
  return "pid";
}

ControllerKind controller_from_name(const std::string& name) {
  if (name == "pid") return ControllerKind::pid;
  if (name == "hdopid") return ControllerKind::hdopid;
  if (name == "td3pid") return ControllerKind::td3pid;
  if (name == "ctph") return ControllerKind::ctph;
  if (name == "oracle") return ControllerKind::oracle;
  throw std::invalid_argument("unknown controller: " + name);
}

ActorPair load_actors(const fs::path& checkpoint_dir) {
  if (checkpoint_dir.empty()) {
    throw std::runtime_error(
        "no checkpoint directory configured (run.checkpoints / --checkpoints)");
  }
  ActorPair pair{load_network<float>(checkpoint_dir / "actor_x.ckpt"),
                 load_network<float>(checkpoint_dir / "actor_y.ckpt")};
  for (const Mlp<float>* net : {&pair.x, &pair.y}) {
    if (net->input_size() != 7 || net->output_size() != 1 ||
        net->layers.back().activation != Activation::tanh) {
      throw std::runtime_error(
          "checkpoint mismatch: expected a 7-input tanh-head actor in " +
          checkpoint_dir.string());
    }
  }
  return pair;
}

std::vector<fs::path> run_train(const ExperimentConfig& cfg) {
  std::vector<fs::path> cells;
  for (std::uint64_t seed : cfg.seeds) {
    cells.push_back(
        train_cell(cfg, cfg.td3, "train", variant_name(cfg.variant), seed));
  }
  return cells;
}

std::vector<fs::path> run_sweep_alpha(const ExperimentConfig& cfg) {
  std::vector<fs::path> cells;
  static const double kFixed[] = {0.0, 0.3, 0.5, 0.7, 1.0};
  for (double alpha : kFixed) {
    Td3Config tcfg = cfg.td3;
    tcfg.adaptive_fusion = false;
    tcfg.fusion.fixed_alpha = alpha;
    const std::string tag = "alpha-" + format_number(alpha);
    for (std::uint64_t seed : cfg.seeds) {
      cells.push_back(train_cell(cfg, tcfg, "sweep-alpha", tag, seed));
    }
  }
  Td3Config tcfg = cfg.td3;
  tcfg.adaptive_fusion = true;
  for (std::uint64_t seed : cfg.seeds) {
    cells.push_back(train_cell(cfg, tcfg, "sweep-alpha", "alpha-adaptive", seed));
  }
  return cells;
}

std::vector<fs::path> run_hdob_bench(const ExperimentConfig& cfg) {
  struct Condition {
    const char* name;
    bool use_observer;
    HybridObserver::Mode mode;
  };
  static const Condition kConditions[] = {
      {"none", false, HybridObserver::Mode::hybrid},
      {"dob", true, HybridObserver::Mode::lowpass_only},
      {"hdob", true, HybridObserver::Mode::hybrid},
  };
  static const DisturbanceKind kChannels[] = {DisturbanceKind::dz_bench,
                                              DisturbanceKind::dpsi_bench};

  const int steps = static_cast<int>(std::lround(cfg.bench_duration / cfg.dt));
  std::vector<fs::path> cells;
  for (DisturbanceKind channel : kChannels) {
    for (const Condition& cond : kConditions) {
      const std::string tag =
          std::string(cond.name) + "-" + disturbance_name(channel);
      for (std::uint64_t seed : cfg.seeds) {
        const fs::path cell =
            cfg.out_dir / "hdob-bench" / tag / std::to_string(seed);

        CascadeConfig cc = cfg.cascade;
        cc.use_observer = cond.use_observer;
        cc.observer_mode = cond.mode;
        HoverEnv env(cfg.params, cc, cfg.td3, cfg.dt);
        // The disturbance realization depends only on (channel, seed), so
        // the three observer conditions face identical episodes.
        DisturbanceModel dist(
            channel, mix_seed(seed, disturbance_name(channel)), cfg.wind);

        CsvWriter curves(cell / "curves.csv",
                         {"episode", "mae", "rmse", "max_abs"});
        double mae_sum = 0.0, rmse_sum = 0.0, max_sum = 0.0;
        int completed = 0;
        for (int ep = 0; ep < cfg.bench_episodes; ++ep) {
          env.reset(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
          dist.begin_episode(cfg.bench_duration);
          std::vector<double> err;
          err.reserve(static_cast<std::size_t>(steps));
          for (int k = 0; k < steps; ++k) {
            const auto step = env.step(0.0f, 0.0f, dist.at(k * cfg.dt));
            if (step.diverged) break;
            err.push_back(channel == DisturbanceKind::dz_bench
                              ? env.state().position.z()
                              : env.state().euler().z());
          }
          if (err.empty()) continue;
          const ErrorStats stats = rmse_mae(err);
          curves.row({ep, stats.mae, stats.rmse, stats.max_abs});
          mae_sum += stats.mae;
          rmse_sum += stats.rmse;
          max_sum += stats.max_abs;
          ++completed;
        }
        std::vector<std::pair<std::string, std::uint64_t>> artifacts;
        artifacts.emplace_back("curves.csv", curves.finish());

        CsvWriter metrics(cell / "metrics.csv",
                          {"condition", "channel", "episodes", "mae_mean",
                           "rmse_mean", "max_abs_mean"});
        const double n = std::max(1, completed);
        metrics.row({cond.name, disturbance_name(channel), completed,
                     mae_sum / n, rmse_sum / n, max_sum / n});
        artifacts.emplace_back("metrics.csv", metrics.finish());
        write_manifest(cell, cfg, tag, seed, std::move(artifacts));
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

std::vector<fs::path> run_p2p(const ExperimentConfig& cfg) {
  const ControllerKind controller = cfg.controller == "all"
                                        ? ControllerKind::ctph
                                        : controller_from_name(cfg.controller);
  std::optional<ActorPair> actors;
  if (needs_actors({controller})) actors = load_actors(cfg.checkpoints);

  std::vector<fs::path> cells;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path cell = cfg.out_dir / "p2p" / controller_name(controller) /
                          std::to_string(seed);
    std::mt19937_64 rng(mix_seed(seed, "p2p-targets"));
    std::uniform_real_distribution<double> u(-5.0, 5.0);

    std::vector<std::pair<std::string, std::uint64_t>> artifacts;
    CsvWriter metrics(
        cell / "metrics.csv",
        {"target", "target_x", "target_y", "target_z",
         "sse_x", "sse_y", "sse_z", "rise_x", "rise_y", "rise_z",
         "rise_valid_x", "rise_valid_y", "rise_valid_z",
         "overshoot_x", "overshoot_y", "overshoot_z", "diverged"});

    std::array<double, 9> sums{};
    int completed = 0;
    for (int ti = 0; ti < cfg.p2p_targets; ++ti) {
      const Eigen::Vector3d target{u(rng), u(rng), u(rng)};
      FlightSpec spec;
      spec.controller = controller;
      spec.actors = actors ? &*actors : nullptr;
      spec.ref = TrajectoryRef::point(target);
      spec.steps = cfg.p2p_steps;
      spec.start = Eigen::Vector3d::Zero();
      const FlightRecord rec = fly(cfg, spec);

      const fs::path traj = cell / ("traj_" + std::to_string(ti) + ".csv");
      artifacts.emplace_back(traj.filename().string(), write_traj(traj, rec));

      std::vector<double> px, py, pz;
      for (const Eigen::Vector3d& p : rec.actual) {
        px.push_back(p.x());
        py.push_back(p.y());
        pz.push_back(p.z());
      }
      if (px.size() < 2) {
        metrics.row({ti, target.x(), target.y(), target.z(), kNan, kNan, kNan,
                     kNan, kNan, kNan, false, false, false, kNan, kNan, kNan,
                     true});
        continue;
      }
      const AxisStepMetrics mx = axis_step_metrics(px, target.x(), cfg.metrics);
      const AxisStepMetrics my = axis_step_metrics(py, target.y(), cfg.metrics);
      const AxisStepMetrics mz = axis_step_metrics(pz, target.z(), cfg.metrics);
      metrics.row({ti, target.x(), target.y(), target.z(),
                   mx.sse, my.sse, mz.sse,
                   mx.rise_time, my.rise_time, mz.rise_time,
                   mx.rise_valid, my.rise_valid, mz.rise_valid,
                   mx.overshoot, my.overshoot, mz.overshoot, rec.diverged});
      const std::array<double, 9> vals = {
          mx.sse, my.sse, mz.sse, mx.rise_time, my.rise_time, mz.rise_time,
          mx.overshoot, my.overshoot, mz.overshoot};
      for (std::size_t i = 0; i < vals.size(); ++i) sums[i] += vals[i];
      ++completed;
    }

    // Average row (target = -1) over the completed targets.
    const double n = std::max(1, completed);
    metrics.row({-1, kNan, kNan, kNan,
                 sums[0] / n, sums[1] / n, sums[2] / n,
                 sums[3] / n, sums[4] / n, sums[5] / n,
                 completed == cfg.p2p_targets, true, true,
                 sums[6] / n, sums[7] / n, sums[8] / n, false});
    artifacts.emplace_back("metrics.csv", metrics.finish());
    write_manifest(cell, cfg, controller_name(controller), seed,
                   std::move(artifacts));
    cells.push_back(cell);
  }
  return cells;
}

std::vector<fs::path> run_track(const ExperimentConfig& cfg) {
  std::vector<TrajectoryKind> trajs;
  if (cfg.track_trajectory == "all" || cfg.track_trajectory == "ellipse") {
    trajs.push_back(TrajectoryKind::ellipse);
  }
  if (cfg.track_trajectory == "all" || cfg.track_trajectory == "square") {
    trajs.push_back(TrajectoryKind::square);
  }
  std::vector<DisturbanceKind> dists;
  for (const char* name : {"none", "d1", "d2", "d3"}) {
    if (cfg.track_disturbance == "all" || cfg.track_disturbance == name) {
      dists.push_back(disturbance_from_name(name));
    }
  }
  const std::vector<ControllerKind> controllers = controller_set(
      cfg, {ControllerKind::pid, ControllerKind::hdopid, ControllerKind::td3pid,
            ControllerKind::ctph});
  std::optional<ActorPair> actors;
  if (needs_actors(controllers)) actors = load_actors(cfg.checkpoints);

  std::vector<fs::path> cells;
  for (TrajectoryKind traj : trajs) {
    const TrajectoryRef ref = make_reference(traj);
    const double duration = cfg.track_laps * ref.period();
    const int steps = static_cast<int>(std::lround(duration / cfg.dt));
    for (DisturbanceKind dist_kind : dists) {
      for (ControllerKind controller : controllers) {
        const std::string tag = std::string(controller_name(controller)) + "-" +
                                trajectory_name(traj) + "-" +
                                disturbance_name(dist_kind);
        for (std::uint64_t seed : cfg.seeds) {
          const fs::path cell =
              cfg.out_dir / "track" / tag / std::to_string(seed);
          // Paired comparisons: the realization ignores the controller.
          DisturbanceModel dist(
              dist_kind,
              mix_seed(seed, std::string(trajectory_name(traj)) + "-" +
                                 disturbance_name(dist_kind)),
              cfg.wind);
          dist.begin_episode(duration);

          FlightSpec spec;
          spec.controller = controller;
          spec.actors = actors ? &*actors : nullptr;
          spec.ref = ref;
          spec.dist = &dist;
          spec.steps = steps;
          const FlightRecord rec = fly(cfg, spec);
          const CellMetrics m = cell_metrics(rec, cfg.metrics);

          std::vector<std::pair<std::string, std::uint64_t>> artifacts;
          artifacts.emplace_back("traj.csv",
                                 write_traj(cell / "traj.csv", rec));
          CsvWriter metrics(cell / "metrics.csv", kTrackHeader);
          metrics.row(track_row(controller_name(controller),
                                trajectory_name(traj),
                                disturbance_name(dist_kind), seed, rec, m));
          artifacts.emplace_back("metrics.csv", metrics.finish());
          write_manifest(cell, cfg, tag, seed, std::move(artifacts));
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

std::vector<fs::path> run_generalize(const ExperimentConfig& cfg) {
  const std::vector<ControllerKind> controllers = controller_set(
      cfg, {ControllerKind::pid, ControllerKind::hdopid, ControllerKind::ctph});
  std::optional<ActorPair> actors;
  if (needs_actors(controllers)) actors = load_actors(cfg.checkpoints);

  const TrajectoryRef ref = TrajectoryRef::square();
  const double duration = cfg.track_laps * ref.period();
  const int steps = static_cast<int>(std::lround(duration / cfg.dt));

  std::vector<fs::path> cells;
  for (ControllerKind controller : controllers) {
    const std::string tag = controller_name(controller);
    for (std::uint64_t seed : cfg.seeds) {
      const fs::path cell =
          cfg.out_dir / "generalize" / tag / std::to_string(seed);
      DisturbanceModel dist(cfg.disturbance, mix_seed(seed, "generalize"),
                            cfg.wind);
      dist.begin_episode(duration);

      FlightSpec spec;
      spec.controller = controller;
      spec.actors = actors ? &*actors : nullptr;
      spec.ref = ref;
      spec.dist = &dist;
      spec.steps = steps;
      // The model redraw sequence is shared by every controller arm.
      spec.rescale_interval = cfg.rescale_interval;
      spec.rescale_fraction = cfg.rescale_fraction;
      spec.rescale_seed = mix_seed(seed, "rescale");
      const FlightRecord rec = fly(cfg, spec);
      const CellMetrics m = cell_metrics(rec, cfg.metrics);

      std::vector<std::pair<std::string, std::uint64_t>> artifacts;
      artifacts.emplace_back("traj.csv", write_traj(cell / "traj.csv", rec));
      auto header = kTrackHeader;
      header.push_back("completed");
      CsvWriter metrics(cell / "metrics.csv", header);
      auto row = track_row(controller_name(controller), "square",
                           disturbance_name(cfg.disturbance), seed, rec, m);
      const bool completed =
          !rec.diverged && static_cast<int>(rec.rows.size()) == steps;
      row.emplace_back(completed);
      metrics.row(row);
      artifacts.emplace_back("metrics.csv", metrics.finish());
      write_manifest(cell, cfg, tag, seed, std::move(artifacts));
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<fs::path> run_replay(const ExperimentConfig& cfg) {
  if (cfg.replay_input.empty()) {
    throw ConfigError("replay needs run.replay_input / --traj-input");
  }
  const CsvTable table = read_csv(cfg.replay_input);
  const std::size_t ct = table.column("t");
  const std::size_t cx = table.column("x");
  const std::size_t cy = table.column("y");
  const std::size_t cz = table.column("z");

  const TrajectoryRef ref = make_reference(cfg.trajectory);
  FlightRecord rec;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double t = table.number(r, ct);
    const Eigen::Vector3d p{table.number(r, cx), table.number(r, cy),
                            table.number(r, cz)};
    const Eigen::Vector3d target = ref.position(t);
    rec.actual.push_back(p);
    rec.reference.push_back(target);
    rec.ex.push_back(target.x() - p.x());
    rec.ey.push_back(target.y() - p.y());
    rec.ez.push_back(target.z() - p.z());
    rec.max_error = std::max(rec.max_error, (target - p).norm());
  }
  const CellMetrics m = cell_metrics(rec, cfg.metrics);

  const std::string tag = cfg.replay_input.stem().string();
  const fs::path cell = cfg.out_dir / "replay" / tag / "0";
  std::vector<std::pair<std::string, std::uint64_t>> artifacts;
  CsvWriter metrics(cell / "metrics.csv", kTrackHeader);
  metrics.row(track_row("replay", trajectory_name(cfg.trajectory),
                        disturbance_name(cfg.disturbance), 0, rec, m));
  artifacts.emplace_back("metrics.csv", metrics.finish());
  write_manifest(cell, cfg, tag, 0, std::move(artifacts));
  return {cell};
}

std::vector<fs::path> run_scenario(const ExperimentConfig& cfg) {
  if (cfg.scenario == "train") return run_train(cfg);
  if (cfg.scenario == "sweep-alpha") return run_sweep_alpha(cfg);
  if (cfg.scenario == "hdob-bench") return run_hdob_bench(cfg);
  if (cfg.scenario == "p2p") return run_p2p(cfg);
  if (cfg.scenario == "track") return run_track(cfg);
  if (cfg.scenario == "generalize") return run_generalize(cfg);
  if (cfg.scenario == "replay") return run_replay(cfg);
  throw ConfigError("unknown scenario: " + cfg.scenario);
}

}  // namespace ctph
