#include "eldnn/rng.hpp"

#include <cmath>
#include <numbers>

namespace eldnn {

namespace {
constexpr std::uint64_t kPcgMult = 6364136223846793005ull;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(0), inc_((stream_id << 1u) | 1u), seed_(seed), stream_id_(stream_id) {
    next_u32();
    state_ += seed;
    next_u32();
}

std::uint32_t RngStream::next_u32() {
    const std::uint64_t old = state_;
    state_ = old * kPcgMult + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

double RngStream::next_double() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
}

double RngStream::next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double RngStream::next_normal() {
    // u1 in (0,1] so the log never sees zero.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint32_t RngStream::next_below(std::uint32_t n) {
    if (n < 2) return 0;
    const std::uint32_t threshold = (-n) % n; // 2^32 mod n
    for (;;) {
        const std::uint32_t r = next_u32();
        if (r >= threshold) return r % n;
    }
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = next_below(static_cast<std::uint32_t>(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

} // namespace eldnn
