#pragma once

#include <cstdint>
#include <random>

namespace isingsim::rng {

// SplitMix64 step. Used only to key substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic engine for logical stream `stream` of master `seed`.
// Streams with distinct (seed, stream) keys are decorrelated regardless of
// how many draws each consumes, so per-row sampling is order-independent.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t key = seed;
    std::uint64_t a = splitmix64(key);
    key ^= 0x6a09e667f3bcc909ull + stream;
    std::uint64_t b = splitmix64(key);
    std::uint64_t c = splitmix64(key);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return std::mt19937_64(seq);
}

// Canonical uniform on [0, 1) with 53 random bits. Bit-identical across
// platforms, unlike std::uniform_real_distribution.
inline double uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % n;
}

// Fisher-Yates shuffle using uniform_below, again for cross-platform
// determinism of sweep orders.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace isingsim::rng
