#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace endocal {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer; bijective on 64-bit words.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Counter-based random stream keyed by (seed, purpose, index).
///
/// Any (seed, purpose, index) triple can be opened directly without
/// generating earlier indices, and draws from one stream never perturb
/// another. All draws are a pure function of the key and the draw counter.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view purpose, std::uint64_t index)
        : key_(detail::mix(detail::mix(detail::splitmix64(seed), detail::fnv1a(purpose)), index)),
          counter_(0) {}

    std::uint64_t next_u64() {
        return detail::splitmix64(key_ + (++counter_) * detail::kGolden);
    }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi]; degenerate ranges return lo exactly.
    double uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Multiply-shift range reduction; bias < 2^-64 is irrelevant here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Log-uniform double over [lo, hi]; requires 0 < lo <= hi.
    double log_uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return lo * std::exp(next_double() * std::log(hi / lo));
    }

    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace endocal
