#pragma once

#include <array>
#include <cstdint>

namespace fspde {

// Philox4x32-10 counter-based generator. A (counter, key) pair maps to four
// 32-bit words through ten mix rounds, so any cell of a noise field can be
// regenerated independently of the others. Verified against the published
// known-answer vectors.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> generate(const std::array<std::uint32_t, 4>& counter,
                                                 const std::array<std::uint32_t, 2>& key);
};

// One standard normal deviate keyed by (seed, word0, word1), via Box-Muller
// on the Philox output. Deterministic and order-free.
double normal_at(std::uint64_t seed, std::uint64_t word0, std::uint64_t word1);

// Uniform deviate in (0, 1], same keying scheme, independent of normal_at
// draws at other word pairs.
double uniform_at(std::uint64_t seed, std::uint64_t word0, std::uint64_t word1);

// Stream-split: derive a child seed (e.g. one per ensemble replica) from a
// base seed. SplitMix64 finalizer; distinct inputs give uncorrelated keys.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

}  // namespace fspde
