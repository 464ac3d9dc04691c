#pragma once

#include <cstdint>
#include <random>

namespace screenopt {

using Rng = std::mt19937_64;

// Independent stream for (seed, index); used per restart and per replicate
// so results do not depend on how work is split across threads.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace screenopt
