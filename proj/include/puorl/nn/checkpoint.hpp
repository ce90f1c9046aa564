#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "puorl/nn/mlp.hpp"

namespace puorl::nn {

// On-disk parameter block:
//   magic "PUORLNN1"
//   u32 layer count (number of entries in layer_dims)
//   u32 layer_dims[...]
//   per affine layer, in order: f32 weights (row-major, in x out), f32 biases
// All integers and floats little-endian. Activations are not stored; the
// reader supplies them, since they are fixed by whichever model owns the net.
void write_mlp(std::ostream& os, const Mlp& net);
Mlp read_mlp(std::istream& is, Activation act, OutputActivation out);

void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(const std::filesystem::path& path, Activation act,
             OutputActivation out);

}  // namespace puorl::nn
