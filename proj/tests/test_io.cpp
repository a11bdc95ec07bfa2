#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ctph/io/config.hpp"
#include "ctph/io/csv.hpp"
#include "ctph/io/runner.hpp"
#include "ctph/nn/checkpoint.hpp"
#include "ctph/nn/mlp.hpp"

using namespace ctph;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::current_path() / "test_io_tmp" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Small, fast training setup used by the determinism checks.
const char* kTinyTrain =
    "run.scenario = train\n"
    "run.variant = td3\n"
    "run.seeds = 7\n"
    "td3.episodes = 2\n"
    "td3.steps_per_episode = 80\n"
    "td3.batch_size = 32\n"
    "replay.warmup_length = 40\n"
    "replay.high_batch_share = 8\n"
    "schedule.xi_ramp_steps = 100\n";

}  // namespace

TEST_CASE("defaults reproduce the published parameter tables") {
  const ExperimentConfig cfg = parse_config("");
  // Vehicle (Table I).
  CHECK(cfg.params.mass == doctest::Approx(0.027).epsilon(1e-12));
  CHECK(cfg.params.gravity == doctest::Approx(9.81));
  CHECK(cfg.params.arm_length == doctest::Approx(0.0397));
  CHECK(cfg.params.inertia_x == doctest::Approx(1.40e-5));
  CHECK(cfg.params.inertia_z == doctest::Approx(2.17e-5));
  CHECK(cfg.params.thrust_coeff == doctest::Approx(2.88e-8));
  CHECK(cfg.params.torque_coeff == doctest::Approx(7.24e-10));
  CHECK(cfg.params.max_motor_speed == doctest::Approx(2670.0));
  // Cascade gains.
  CHECK(cfg.cascade.height_gains.kp == doctest::Approx(3.0));
  CHECK(cfg.cascade.height_gains.kd == doctest::Approx(2.0));
  CHECK(cfg.cascade.attitude_gains.kp == doctest::Approx(10.4));
  CHECK(cfg.cascade.attitude_gains.kd == doctest::Approx(1.2));
  // Agent (Table II).
  CHECK(cfg.td3.gamma == doctest::Approx(0.99));
  CHECK(cfg.td3.tau == doctest::Approx(5e-3));
  CHECK(cfg.td3.policy_delay == 2);
  CHECK(cfg.td3.batch_size == 256);
  CHECK(cfg.td3.episodes == 200);
  CHECK(cfg.td3.steps_per_episode == 750);
  CHECK(cfg.td3.actor_lr.initial == doctest::Approx(5e-4));
  CHECK(cfg.td3.critic_lr.initial == doctest::Approx(1e-3));
  CHECK(cfg.td3.replay.main_capacity == 50000);
  CHECK(cfg.td3.replay.high_capacity == 25000);
  CHECK(cfg.td3.schedule.t0 == 75000);
  CHECK(cfg.td3.fusion.alpha_min == doctest::Approx(0.3));
  CHECK(cfg.td3.fusion.alpha_max == doctest::Approx(0.7));
  CHECK(cfg.td3.fusion.fixed_alpha == doctest::Approx(1.0));
  CHECK(cfg.td3.critic_count == 3);
  CHECK(cfg.variant == Td3Variant::ctph);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(cfg.dt == doctest::Approx(0.01));
  CHECK(cfg.metrics.dt == doctest::Approx(0.01));
}

TEST_CASE("parser rejects malformed input with line numbers") {
  CHECK_THROWS_AS(parse_config("sim.mass = 0.027\nnot a binding\n"),
                  ConfigError);
  try {
    parse_config("sim.mass = 0.027\n\nsim.bogus_key = 1\n", "demo.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("demo.cfg:3") != std::string::npos);
    CHECK(what.find("sim.bogus_key") != std::string::npos);
  }
  try {
    parse_config("td3.gamma = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("td3.gamma") != std::string::npos);
  }
}

TEST_CASE("constraint violations are reported by name") {
  try {
    parse_config("sim.mass = -0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mass") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("run.seeds = \n"), ConfigError);
  CHECK_THROWS_AS(parse_config("run.scenario = launch\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("fusion.fixed_alpha = 1.5\n"), ConfigError);
}

TEST_CASE("echo round-trips through the parser") {
  const ExperimentConfig cfg = parse_config(
      "run.variant = two-critic\n"
      "run.seeds = 9,10\n"
      "fusion.fixed_alpha = 0.25\n"
      "td3.episodes = 11\n"
      "hdob.median_window = 7\n");
  CHECK(cfg.td3.critic_count == 2);
  CHECK_FALSE(cfg.td3.adaptive_fusion);
  const std::string echoed = cfg.echo();
  const ExperimentConfig again = parse_config(echoed, "<echo>");
  CHECK(again.echo() == echoed);
  CHECK(again.seeds == std::vector<std::uint64_t>{9, 10});
  CHECK(again.td3.fusion.fixed_alpha == doctest::Approx(0.25));
  CHECK(again.td3.episodes == 11);
}

TEST_CASE("variant is assignment-time shorthand for the ablation switches") {
  // run.variant expands to the four td3.* switches when the line is applied;
  // later lines override it like any other assignment. Echoed configs list
  // run.* before td3.*, which keeps the round-trip exact.
  const ExperimentConfig cfg = parse_config(
      "run.variant = td3\n"
      "td3.use_expert = true\n");
  CHECK(cfg.td3.use_expert);
  CHECK_FALSE(cfg.td3.use_dual_replay);
  CHECK_FALSE(cfg.td3.adaptive_fusion);
  CHECK(cfg.td3.critic_count == 2);

  // ...and in the opposite order the shorthand wins, because it is last.
  const ExperimentConfig rev = parse_config(
      "td3.use_expert = true\n"
      "run.variant = td3\n");
  CHECK_FALSE(rev.td3.use_expert);
}

TEST_CASE("fnv1a matches the reference test vectors") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  // Chaining equals hashing the concatenation.
  CHECK(fnv1a("bar", fnv1a("foo")) == fnv1a("foobar"));
}

TEST_CASE("number formatting survives a write/read round-trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_number(1e300)) == 1e300);
  CHECK(format_number(42.0) == "42");
  CHECK(format_number(0.0) == "0");
}

TEST_CASE("csv writer/reader round-trip and hash stability") {
  const fs::path dir = fresh_dir("csv");
  const fs::path file = dir / "table.csv";
  std::uint64_t digest = 0;
  {
    CsvWriter w(file, {"name", "value", "flag"});
    w.row({"alpha", 0.1, true});
    w.row({"beta", -3.5e-7, false});
    CHECK_THROWS_AS(w.row({"too", "wide", 1.0, 2.0}), std::invalid_argument);
    digest = w.finish();
  }
  CHECK(digest == fnv1a(slurp(file)));
  CHECK(digest == hash_file(file));

  const CsvTable t = read_csv(file);
  CHECK(t.header == std::vector<std::string>{"name", "value", "flag"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.number(0, t.column("value")) == 0.1);
  CHECK(t.number(1, t.column("value")) == -3.5e-7);
  CHECK(t.number(1, t.column("flag")) == 0.0);
  CHECK_THROWS_AS(t.column("missing"), std::out_of_range);
  CHECK_THROWS_AS(t.number(0, t.column("name")), std::invalid_argument);
  CHECK_THROWS_AS(read_csv(dir / "absent.csv"), std::runtime_error);
}

TEST_CASE("oracle controller yields exact zero steady-state error rows") {
  ExperimentConfig cfg = parse_config(
      "run.scenario = p2p\n"
      "run.controller = oracle\n"
      "run.seeds = 3\n"
      "run.p2p_targets = 4\n"
      "run.p2p_steps = 200\n");
  cfg.out_dir = fresh_dir("oracle");
  const auto cells = run_scenario(cfg);
  REQUIRE(cells.size() == 1);
  const CsvTable t = read_csv(cells[0] / "metrics.csv");
  REQUIRE(t.rows.size() == 5);  // 4 targets + average row
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CHECK(t.rows[r][t.column("sse_x")] == "0");
    CHECK(t.rows[r][t.column("sse_y")] == "0");
    CHECK(t.rows[r][t.column("sse_z")] == "0");
    CHECK(t.rows[r][t.column("diverged")] == "0");
  }
}

TEST_CASE("null-stimulus bench makes the observer conditions agree") {
  ExperimentConfig cfg = parse_config(
      "run.scenario = hdob-bench\n"
      "run.seeds = 1\n"
      "run.bench_episodes = 3\n"
      "run.bench_duration = 2\n"
      "dist.dz_amplitude = 0\n"
      "dist.dpsi_amplitude = 0\n"
      "dist.dz_noise_std = 0\n"
      "dist.dpsi_noise_std = 0\n"
      "dist.pulse_probability = 0\n");
  cfg.out_dir = fresh_dir("bench0");
  const auto cells = run_scenario(cfg);
  REQUIRE(cells.size() == 6);  // {none,dob,hdob} x {dz,dpsi}
  for (const fs::path& cell : cells) {
    const CsvTable t = read_csv(cell / "metrics.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.number(0, t.column("episodes")) == 3.0);
    // No stimulus, start on target: the estimates stay ~0 and so does the
    // response, with or without compensation.
    CHECK(t.number(0, t.column("mae_mean")) <= 1e-9);
    CHECK(t.number(0, t.column("max_abs_mean")) <= 1e-9);
  }
}

TEST_CASE("train cells are byte-identical across reruns") {
  ExperimentConfig cfg = parse_config(kTinyTrain);
  cfg.out_dir = fresh_dir("train_a");
  const auto a = run_scenario(cfg);
  cfg.out_dir = fresh_dir("train_b");
  const auto b = run_scenario(cfg);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  for (const char* name : {"curves.csv", "metrics.csv",
                           "checkpoints/actor_x.ckpt",
                           "checkpoints/actor_y.ckpt",
                           "checkpoints/actor_x.ckpt.json"}) {
    CHECK(slurp(a[0] / name) == slurp(b[0] / name));
  }
  const std::string manifest = slurp(a[0] / "manifest");
  CHECK(manifest.find("scenario = train") != std::string::npos);
  CHECK(manifest.find("content_hash = ") != std::string::npos);
  CHECK(manifest.find("[config]") != std::string::npos);
  CHECK(manifest.find("td3.episodes = 2") != std::string::npos);
}

TEST_CASE("track cells are deterministic and replay reproduces them") {
  ExperimentConfig cfg = parse_config(
      "run.scenario = track\n"
      "run.controller = pid\n"
      "run.track_trajectory = ellipse\n"
      "run.track_disturbance = d2\n"
      "run.track_laps = 1\n"
      "run.seeds = 4\n");
  cfg.out_dir = fresh_dir("track_a");
  const auto a = run_scenario(cfg);
  cfg.out_dir = fresh_dir("track_b");
  const auto b = run_scenario(cfg);
  REQUIRE(a.size() == 1);
  CHECK(slurp(a[0] / "traj.csv") == slurp(b[0] / "traj.csv"));
  CHECK(slurp(a[0] / "metrics.csv") == slurp(b[0] / "metrics.csv"));

  // Re-deriving metrics from the recorded trajectory gives the same numbers.
  ExperimentConfig rcfg = parse_config(
      "run.scenario = replay\n"
      "run.trajectory = ellipse\n");
  rcfg.replay_input = a[0] / "traj.csv";
  rcfg.out_dir = fresh_dir("replay");
  const auto r = run_scenario(rcfg);
  REQUIRE(r.size() == 1);
  const CsvTable tracked = read_csv(a[0] / "metrics.csv");
  const CsvTable replayed = read_csv(r[0] / "metrics.csv");
  for (const char* col : {"rmse_x", "rmse_y", "rmse_z", "mae_x", "mae_y",
                          "mae_z", "latency_avg", "max_error"}) {
    CHECK(tracked.rows[0][tracked.column(col)] ==
          replayed.rows[0][replayed.column(col)]);
  }
}

TEST_CASE("checkpoint loading validates the actor shape") {
  const fs::path dir = fresh_dir("ckpt");
  CHECK_THROWS_AS(load_actors(dir), std::runtime_error);

  std::mt19937_64 rng(5);
  const auto wrong =
      Mlp<float>::make({3, 8, 1}, {Activation::relu, Activation::tanh}, rng);
  save_network(dir / "actor_x.ckpt", wrong);
  save_network(dir / "actor_y.ckpt", wrong);
  try {
    load_actors(dir);
    FAIL("expected checkpoint mismatch");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).rfind("checkpoint mismatch", 0) == 0);
  }

  const auto right = Mlp<float>::make(
      {7, 16, 16, 1}, {Activation::relu, Activation::relu, Activation::tanh},
      rng);
  save_network(dir / "actor_x.ckpt", right);
  save_network(dir / "actor_y.ckpt", right);
  const ActorPair pair = load_actors(dir);
  CHECK(pair.x.input_size() == 7);
  CHECK(pair.y.output_size() == 1);
}
