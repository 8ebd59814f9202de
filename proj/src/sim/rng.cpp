#include "pdq/sim/rng.hpp"

#include <cmath>

namespace pdq::sim {

uint64_t splitmix64(uint64_t& state)
{
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t stream_seed(uint64_t seed, std::string_view name)
{
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    uint64_t state = seed ^ h;
    splitmix64(state);
    return splitmix64(state);
}

uint64_t Rng::uniform_int(uint64_t lo, uint64_t hi)
{
    const uint64_t span = hi - lo + 1;
    if (span == 0) return engine_();
    // Rejection sampling keeps the draw unbiased.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return lo + v % span;
}

double Rng::exponential(double mean)
{
    return -mean * std::log1p(-uniform01());
}

} // namespace pdq::sim
