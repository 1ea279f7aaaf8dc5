#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sabc {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seed for an independent stream identified by a run seed and a path of counters
/// (e.g. round, population, draw index). Streams depend only on the key, never on
/// which worker consumes them.
inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> key) noexcept
{
    std::uint64_t h = detail::splitmix64(seed);
    for (auto k : key) {
        h = detail::splitmix64(h ^ detail::splitmix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key)
{
    return Rng(stream_seed(seed, key));
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace sabc
