#pragma once

#include <cstdint>
#include <random>

namespace towe {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream). Streams keep parameter
// initialization and epoch shuffling from sharing state.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

enum RngStream : std::uint64_t {
  kInitStream = 0,
  kShuffleStream = 1,
  kDataStream = 2,
};

}  // namespace towe
