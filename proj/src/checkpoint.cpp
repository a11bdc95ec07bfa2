#include "ctph/nn/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <vector>

namespace ctph {

namespace {

constexpr uint32_t kMagic = 0x4E505443;  // "CTPN" little-endian
constexpr uint32_t kVersion = 1;

void write_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::ifstream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

double read_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

template <typename Scalar>
void save_impl(const std::filesystem::path& path, const Mlp<Scalar>& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("save_network: cannot open " + path.string());
  }
  write_u32(out, kMagic);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    write_u32(out, static_cast<uint32_t>(layer.weight.cols()));
    write_u32(out, static_cast<uint32_t>(layer.weight.rows()));
    write_u32(out, static_cast<uint32_t>(layer.activation));
  }
  for (const auto& layer : net.layers) {
    for (int i = 0; i < layer.weight.rows(); ++i) {
      for (int j = 0; j < layer.weight.cols(); ++j) {
        write_f64(out, static_cast<double>(layer.weight(i, j)));
      }
    }
    for (int i = 0; i < layer.bias.size(); ++i) {
      write_f64(out, static_cast<double>(layer.bias(i)));
    }
  }
  if (!out) {
    throw std::runtime_error("save_network: write failed for " +
                             path.string());
  }
}

}  // namespace

void save_network(const std::filesystem::path& path, const Mlp<double>& net) {
  save_impl(path, net);
}

void save_network(const std::filesystem::path& path, const Mlp<float>& net) {
  save_impl(path, net);
}

template <typename Scalar>
Mlp<Scalar> load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_network: cannot open " + path.string());
  }
  if (read_u32(in) != kMagic) {
    throw std::runtime_error("load_network: bad magic in " + path.string());
  }
  if (read_u32(in) != kVersion) {
    throw std::runtime_error("load_network: unsupported version in " +
                             path.string());
  }
  const uint32_t n_layers = read_u32(in);
  if (n_layers == 0 || n_layers > 64) {
    throw std::runtime_error("load_network: implausible layer count");
  }

  struct Shape {
    uint32_t in, out, act;
  };
  std::vector<Shape> shapes(n_layers);
  for (auto& s : shapes) {
    s.in = read_u32(in);
    s.out = read_u32(in);
    s.act = read_u32(in);
    if (s.in == 0 || s.out == 0 || s.in > 65536 || s.out > 65536 ||
        s.act > 2) {
      throw std::runtime_error("load_network: corrupt layer header");
    }
  }

  Mlp<Scalar> net;
  for (const auto& s : shapes) {
    typename Mlp<Scalar>::Layer layer;
    layer.weight.resize(s.out, s.in);
    layer.bias.resize(s.out);
    layer.activation = static_cast<Activation>(s.act);
    for (uint32_t i = 0; i < s.out; ++i) {
      for (uint32_t j = 0; j < s.in; ++j) {
        layer.weight(i, j) = static_cast<Scalar>(read_f64(in));
      }
    }
    for (uint32_t i = 0; i < s.out; ++i) {
      layer.bias(i) = static_cast<Scalar>(read_f64(in));
    }
    net.layers.push_back(std::move(layer));
  }
  if (!in) {
    throw std::runtime_error("load_network: truncated payload in " +
                             path.string());
  }
  return net;
}

template Mlp<double> load_network<double>(const std::filesystem::path&);
template Mlp<float> load_network<float>(const std::filesystem::path&);

}  // namespace ctph
