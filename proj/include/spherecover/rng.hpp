#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spherecover {

using Rng = std::mt19937_64;

// Stream seed for one purpose of a run: the master seed mixed with a tag
// ("y-centers", "mc-verify", ...) through FNV-1a and splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// Per-shard stream for sharded sampling.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t shard);

inline Rng make_rng(std::uint64_t master, std::string_view tag) { return Rng(derive_seed(master, tag)); }

}  // namespace spherecover
