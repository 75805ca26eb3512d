#pragma once

// Portable, counter-based random streams.
//
// A stream is a SplitMix64 sequence: output k is mix64(key + (k+1) * gamma).
// The key of a stream is derived from (seed, label, index) so independent
// replicates can be generated in any order, on any thread, with bit-identical
// results.

#include <cstdint>
#include <limits>
#include <string_view>

namespace netmoment {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a, used only to turn stream labels into integers.
inline constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                           std::uint64_t index = 0) noexcept {
    return mix64(mix64(seed ^ label_hash(label)) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit constexpr RandomStream(std::uint64_t key) noexcept : key_(key) {}

    RandomStream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) noexcept
        : key_(derive_seed(seed, label, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform on [0,1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound == 0) return 0;
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace netmoment
