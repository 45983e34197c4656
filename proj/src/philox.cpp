#include "fspde/philox.hpp"

#include <cmath>
#include <numbers>

namespace fspde {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(x[0]) * kMul0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(x[2]) * kMul1;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::generate(const std::array<std::uint32_t, 4>& counter,
                                                  const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        round_once(x, k);
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return x;
}

namespace {

inline std::array<std::uint32_t, 4> block_at(std::uint64_t seed, std::uint64_t w0, std::uint64_t w1) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
        static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    return Philox4x32::generate(ctr, key);
}

inline double u64_to_unit(std::uint64_t v) {
    // (0, 1]: top 53 bits, shifted away from zero so log() is safe.
    return (static_cast<double>(v >> 11) + 1.0) * 0x1p-53;
}

}  // namespace

double uniform_at(std::uint64_t seed, std::uint64_t word0, std::uint64_t word1) {
    const auto r = block_at(seed, word0, word1);
    return u64_to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
}

double normal_at(std::uint64_t seed, std::uint64_t word0, std::uint64_t word1) {
    const auto r = block_at(seed, word0, word1);
    const double u1 = u64_to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
    const double u2 = u64_to_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace fspde
