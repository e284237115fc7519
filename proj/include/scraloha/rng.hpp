#pragma once

// Deterministic random numbers for the simulator.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by four
// successive outputs of splitmix64 applied to the 64-bit user seed. Uniform
// doubles take the top 53 bits. The Poisson and binomial samplers below are
// exact inversion samplers written out here rather than taken from <random>,
// whose distributions are not specified bit-for-bit across standard
// libraries; with these, a (seed, config) pair reproduces the same trace on
// any conforming platform.

#include <array>
#include <cstdint>
#include <limits>

namespace scraloha {

/// One splitmix64 step: advances state and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the i-th independent stream derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// X ~ Poisson(mean). mean must be finite and >= 0.
std::uint64_t sample_poisson(Xoshiro256& rng, double mean);

/// X ~ Binomial(n, p). p must lie in [0, 1].
std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p);

}  // namespace scraloha
