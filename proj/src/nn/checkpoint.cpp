#include "puorl/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "puorl/io_util.hpp"

namespace puorl::nn {

namespace {
constexpr char kMagic[9] = "PUORLNN1";
}

void write_mlp(std::ostream& os, const Mlp& net) {
  io::write_bytes(os, kMagic, 8);
  io::write_u32(os, static_cast<std::uint32_t>(net.layer_dims.size()));
  for (int d : net.layer_dims) {
    io::write_u32(os, static_cast<std::uint32_t>(d));
  }
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];  // row-major, contiguous
    io::write_f32_array(
        os, std::span<const float>(w.data(), static_cast<std::size_t>(w.size())));
    const auto& b = net.biases[l];
    io::write_f32_array(
        os, std::span<const float>(b.data(), static_cast<std::size_t>(b.size())));
  }
}

Mlp read_mlp(std::istream& is, Activation act, OutputActivation out) {
  io::expect_magic(is, kMagic, "network checkpoint");
  const std::uint32_t n_dims = io::read_u32(is, "layer count");
  if (n_dims < 2 || n_dims > 64) {
    throw FormatError("network checkpoint: implausible layer count " +
                      std::to_string(n_dims));
  }
  std::vector<int> dims(n_dims);
  for (auto& d : dims) {
    d = static_cast<int>(io::read_u32(is, "layer dims"));
    if (d <= 0) throw FormatError("network checkpoint: non-positive layer dim");
  }
  Mlp net = Mlp::zeros(dims, act, out);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    auto& w = net.weights[l];
    io::read_f32_array(
        is, std::span<float>(w.data(), static_cast<std::size_t>(w.size())),
        "weights");
    auto& b = net.biases[l];
    io::read_f32_array(
        is, std::span<float>(b.data(), static_cast<std::size_t>(b.size())),
        "biases");
  }
  return net;
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
  std::ostringstream os(std::ios::binary);
  write_mlp(os, net);
  io::atomic_write_file(path, os.str());
}

Mlp load_mlp(const std::filesystem::path& path, Activation act,
             OutputActivation out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open network checkpoint: " + path.string());
  return read_mlp(is, act, out);
}

}  // namespace puorl::nn
