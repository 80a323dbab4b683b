#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evbranch {

/// SplitMix64 finalizer, used to derive well-separated seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the stream of sequence `index` under a dataset seed:
/// splitmix64(splitmix64(seed) ^ index).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ index);
}

/// Portable random stream. std::mt19937_64 has a standard-mandated output
/// sequence; the variates are derived here rather than through <random>
/// distributions, whose algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Exponential with the given rate (> 0).
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
    std::mt19937_64 engine_;
};

}  // namespace evbranch
