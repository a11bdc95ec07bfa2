// ctph — experiment driver for the cascaded TD3-PID workbench.
//
// One subcommand per scenario; every run writes its artifacts plus a manifest
// (resolved config + content hash) under --out. Exit codes: 0 success,
// 2 configuration/usage error, 3 I/O error, 4 checkpoint mismatch, 1 other.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctph/io/config.hpp"
#include "ctph/io/runner.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string seeds;
  std::string out;
  std::string variant;
  std::string disturbance;
  std::string trajectory;
  std::string controller;
  std::string checkpoints;
  std::string replay_input;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seeds, "comma-separated seed list override");
  cmd->add_option("--out", opt.out, "output directory (default: runs)");
  cmd->add_option("--variant", opt.variant,
                  "training variant: ctph | no-dual-replay | no-expert | "
                  "two-critic | td3");
  cmd->add_option("--disturbance", opt.disturbance,
                  "disturbance model: none | d1 | d2 | d3 | dz | dpsi");
  cmd->add_option("--trajectory", opt.trajectory,
                  "reference: point | ellipse | square");
  cmd->add_option("--controller", opt.controller,
                  "evaluation controller: pid | hdopid | td3pid | ctph | "
                  "oracle | all");
  cmd->add_option("--checkpoints", opt.checkpoints,
                  "directory holding actor_x.ckpt / actor_y.ckpt");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    std::size_t used = 0;
    seeds.push_back(std::stoull(item, &used));
    if (used != item.size()) {
      throw ctph::ConfigError("invalid seed '" + item + "'");
    }
    pos = comma + 1;
  }
  return seeds;
}

ctph::ExperimentConfig resolve(const std::string& scenario,
                               const CliOptions& opt) {
  ctph::ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = ctph::load_config(opt.config_path);
  }
  cfg.scenario = scenario;
  if (!opt.seeds.empty()) cfg.seeds = parse_seed_list(opt.seeds);
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (!opt.variant.empty()) {
    cfg.variant = ctph::variant_from_name(opt.variant);
    cfg.td3.apply_variant(cfg.variant);
  }
  if (!opt.disturbance.empty()) {
    cfg.disturbance = ctph::disturbance_from_name(opt.disturbance);
    cfg.track_disturbance = opt.disturbance;
  }
  if (!opt.trajectory.empty()) {
    cfg.trajectory = ctph::trajectory_from_name(opt.trajectory);
    cfg.track_trajectory = opt.trajectory;
  }
  if (!opt.controller.empty()) cfg.controller = opt.controller;
  if (!opt.checkpoints.empty()) cfg.checkpoints = opt.checkpoints;
  if (!opt.replay_input.empty()) cfg.replay_input = opt.replay_input;
  cfg.finalize();
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascaded TD3-PID quadrotor control workbench"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string scenario;
  for (const char* name : {"train", "sweep-alpha", "hdob-bench", "p2p",
                           "track", "generalize"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common_flags(cmd, opt);
    cmd->callback([&scenario, name] { scenario = name; });
  }
  CLI::App* replay = app.add_subcommand(
      "replay", "re-derive tracking metrics from a recorded traj.csv");
  add_common_flags(replay, opt);
  replay->add_option("input", opt.replay_input, "traj.csv to analyze")
      ->required()
      ->check(CLI::ExistingFile);
  replay->callback([&scenario] { scenario = "replay"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ctph::ExperimentConfig cfg = resolve(scenario, opt);
    const std::vector<std::filesystem::path> cells = ctph::run_scenario(cfg);
    for (const std::filesystem::path& cell : cells) {
      std::cout << cell.string() << '\n';
    }
    std::cout << "ok: " << cells.size() << " cell"
              << (cells.size() == 1 ? "" : "s") << '\n';
    return 0;
  } catch (const ctph::ConfigError& e) {
    std::cerr << "ctph: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ctph: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "ctph: i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.rfind("checkpoint mismatch", 0) == 0) {
      std::cerr << "ctph: " << what << '\n';
      return 4;
    }
    if (what.find("cannot write") != std::string::npos ||
        what.find("cannot open") != std::string::npos) {
      std::cerr << "ctph: i/o error: " << what << '\n';
      return 3;
    }
    std::cerr << "ctph: error: " << what << '\n';
    return 1;
  }
}
