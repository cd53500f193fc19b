#ifndef MGRAPH_RNG_HPP
#define MGRAPH_RNG_HPP

#include <cstdint>
#include <random>

namespace mgraph {

using Rng = std::mt19937_64;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter scheme: the stream for (master, tag, index) is seeded with
// mix64(mix64(mix64(master) ^ tag) ^ index). Replica i never depends on
// how many replicas or workers exist.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index)
{
    return mix64(mix64(mix64(master) ^ tag) ^ index);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t tag = 0, std::uint64_t index = 0)
{
    return Rng(stream_seed(master, tag, index));
}

namespace stream {
constexpr std::uint64_t direct = 0x11;
constexpr std::uint64_t lifo = 0x22;
constexpr std::uint64_t pinch = 0x33;
constexpr std::uint64_t markov = 0x44;
constexpr std::uint64_t gw = 0x55;
constexpr std::uint64_t limit = 0x66;
}

inline double uniform01(Rng& g)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

} // namespace mgraph

#endif
