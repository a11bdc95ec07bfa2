#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctph/io/config.hpp"
#include "ctph/nn/mlp.hpp"

namespace ctph {

/// Evaluation-time controller arms. `pid` is the plain cascade with a PD
/// outer loop, `hdopid` adds the hybrid observers, `td3pid` swaps the outer
/// loop for the trained policy, `ctph` combines policy and observers.
/// `oracle` teleports onto the reference — a plumbing check that exercises
/// the logging and metrics path end to end.
enum class ControllerKind { pid, hdopid, td3pid, ctph, oracle };

const char* controller_name(ControllerKind kind);
ControllerKind controller_from_name(const std::string& name);

/// Trained horizontal-axis actors as produced by the train scenario.
struct ActorPair {
  Mlp<float> x, y;
};

/// Loads actor_x.ckpt / actor_y.ckpt from a checkpoint directory and
/// validates their shape against the observation/action interface. Throws
/// std::runtime_error on missing files or mismatched architecture.
ActorPair load_actors(const std::filesystem::path& checkpoint_dir);

/// Scenario drivers. Each writes one cell directory per (variant, seed)
/// combination under cfg.out_dir/<scenario>/ and returns the cells created.
/// Every cell holds its CSV artifacts plus a manifest carrying the resolved
/// configuration and FNV-1a content hashes. All drivers are deterministic
/// functions of (cfg, seeds).
std::vector<std::filesystem::path> run_train(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_sweep_alpha(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_hdob_bench(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_p2p(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_track(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_generalize(const ExperimentConfig& cfg);
std::vector<std::filesystem::path> run_replay(const ExperimentConfig& cfg);

/// Dispatches on cfg.scenario.
std::vector<std::filesystem::path> run_scenario(const ExperimentConfig& cfg);

}  // namespace ctph
