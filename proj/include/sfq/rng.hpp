#pragma once

#include <cstdint>
#include <string_view>

namespace sfq {

// Per-node RNG stream seed: adding or renaming one node must never perturb
// the randomness seen by any other node, so streams are keyed on the node
// name rather than on insertion order.
std::uint64_t node_stream_seed(std::uint64_t global_seed, std::string_view node_name);

}  // namespace sfq
