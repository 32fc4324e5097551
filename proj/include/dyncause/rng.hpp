#pragma once

#include <cstdint>
#include <random>

namespace dyncause {

// splitmix64 finalizer. Used to spread seed material so that derived
// streams (per window, per replication) are decorrelated.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for stream `index` under `seed`. Replication b of window w uses
// derive_stream(derive_stream(master, w), b); a one-off run derives directly
// from its master seed. Deterministic for a given (seed, index) on every
// platform, which is what makes results independent of the thread count.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Uniform draw from [0, bound) by rejection, so the result depends only on
// the mt19937_64 output sequence (std::uniform_int_distribution is not
// pinned down by the standard and may differ across library versions).
inline std::uint64_t bounded_uint(std::mt19937_64& eng, std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t v = eng();
    while (v >= limit) v = eng();
    return v % bound;
}

} // namespace dyncause
