#pragma once

#include <filesystem>
#include <string>

#include "ctph/nn/mlp.hpp"

namespace ctph {

/// Flat binary network checkpoint.
///
/// Layout (all integers little-endian uint32):
///   magic 'CTPN' | version (1) | n_layers
///   per layer: input size | output size | activation tag
///   per layer: weight matrix row-major float64 LE, then bias float64 LE
///
/// Floating-point payload is always 64-bit regardless of the in-memory
/// scalar type. A JSON sidecar (same path + ".json") carrying training
/// counters is written separately by the owner of the network.
void save_network(const std::filesystem::path& path, const Mlp<double>& net);
void save_network(const std::filesystem::path& path, const Mlp<float>& net);

/// Loads a checkpoint into the requested scalar type. Throws
/// std::runtime_error on magic/version/shape corruption.
template <typename Scalar>
Mlp<Scalar> load_network(const std::filesystem::path& path);

extern template Mlp<double> load_network<double>(
    const std::filesystem::path&);
extern template Mlp<float> load_network<float>(const std::filesystem::path&);

}  // namespace ctph
