#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pdq::sim {

uint64_t splitmix64(uint64_t& state);

/// Seed for a named stream; independent of how many other streams exist.
uint64_t stream_seed(uint64_t seed, std::string_view name);

/// mt19937_64 with hand-rolled transforms so draws match across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}
    Rng(uint64_t seed, std::string_view stream) : engine_(stream_seed(seed, stream)) {}

    uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [lo, hi].
    uint64_t uniform_int(uint64_t lo, uint64_t hi);
    double exponential(double mean);
    bool bernoulli(double p) { return p > 0 && uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace pdq::sim
