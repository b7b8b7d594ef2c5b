#ifndef ELDNN_RNG_HPP
#define ELDNN_RNG_HPP

#include <cstdint>
#include <vector>

namespace eldnn {

/// Deterministic, stream-splittable generator (PCG-32, O'Neill 2014).
/// Identical (seed, stream_id, call sequence) produces identical output on
/// every platform; distinct stream ids select statistically independent
/// sequences from the same seed. std::random distributions are avoided on
/// purpose: their output is implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint32_t next_u32();
    /// Uniform on [0, 1) with 53 random mantissa bits.
    double next_double();
    /// Uniform on [lo, hi).
    double next_uniform(double lo, double hi);
    /// Standard normal via Box-Muller (no cached partner, fixed call cost).
    double next_normal();
    /// Unbiased integer in [0, n).
    std::uint32_t next_below(std::uint32_t n);
    /// Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::uint64_t state_;
    std::uint64_t inc_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

/// Fixed stream ids, one per purpose, so e.g. mask sequences do not move
/// when an unrelated consumer is added or removed.
namespace streams {
inline constexpr std::uint64_t kInit = 0;
inline constexpr std::uint64_t kMask = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kData = 3;
inline constexpr std::uint64_t kPredict = 4;
inline constexpr std::uint64_t kGap = 5;
inline constexpr std::uint64_t kTheory = 6;

/// Stream id for per-example work: parallel and serial runs then draw
/// identical randomness for example `index`.
inline constexpr std::uint64_t per_example(std::uint64_t purpose,
                                           std::uint64_t index) {
    return (purpose << 32) | (index & 0xffffffffull);
}
} // namespace streams

} // namespace eldnn

#endif
