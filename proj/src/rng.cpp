#include "scraloha/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "scraloha/special_functions.hpp"

namespace scraloha {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Inversion over the support enumerated outward from the mode:
// mode, mode+1, mode-1, mode+2, mode-2, ... Any fixed enumeration order gives
// an exact sampler; starting at the mode makes the expected number of steps
// proportional to the standard deviation. `up(k)` is pmf(k+1)/pmf(k) and
// `down(k)` is pmf(k-1)/pmf(k).
template <class Up, class Down>
std::uint64_t invert_from_mode(double u, std::uint64_t mode, std::uint64_t upper,
                               long double p_mode, Up up, Down down) {
    long double acc = p_mode;
    if (u < acc) return mode;
    std::uint64_t lo = mode;
    std::uint64_t hi = mode;
    long double p_lo = p_mode;
    long double p_hi = p_mode;
    while (true) {
        const bool can_up = hi < upper && p_hi > 0.0L;
        const bool can_down = lo > 0 && p_lo > 0.0L;
        if (!can_up && !can_down) return mode;  // u beyond the rounded total mass
        if (can_up) {
            p_hi *= up(hi);
            ++hi;
            acc += p_hi;
            if (u < acc) return hi;
        }
        if (can_down) {
            p_lo *= down(lo);
            --lo;
            acc += p_lo;
            if (u < acc) return lo;
        }
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t state = base ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(state);
    return splitmix64(state);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256::result_type Xoshiro256::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t sample_poisson(Xoshiro256& rng, double mean) {
    if (!std::isfinite(mean) || mean < 0.0) {
        throw std::invalid_argument("sample_poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    const double u = rng.uniform01();
    const auto mode = static_cast<std::uint64_t>(std::floor(mean));
    const long double m = mean;
    const long double p_mode = std::exp(poisson_log_pmf(mean, mode));
    return invert_from_mode(
        u, mode, std::numeric_limits<std::uint64_t>::max(), p_mode,
        [m](std::uint64_t k) { return m / static_cast<long double>(k + 1); },
        [m](std::uint64_t k) { return static_cast<long double>(k) / m; });
}

std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_binomial: p must lie in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const double u = rng.uniform01();
    const long double pl = p;
    const long double ql = 1.0L - pl;
    const long double nl = static_cast<long double>(n);
    auto mode = static_cast<std::uint64_t>(std::floor((nl + 1.0L) * pl));
    if (mode > n) mode = n;
    const long double ml = static_cast<long double>(mode);
    const long double log_p_mode = std::lgamma(nl + 1.0L) - std::lgamma(ml + 1.0L) -
                                   std::lgamma(nl - ml + 1.0L) + ml * std::log(pl) +
                                   (nl - ml) * std::log1p(-pl);
    const long double odds = pl / ql;
    return invert_from_mode(
        u, mode, n, std::exp(log_p_mode),
        [=](std::uint64_t k) {
            return static_cast<long double>(n - k) / static_cast<long double>(k + 1) * odds;
        },
        [=](std::uint64_t k) {
            return static_cast<long double>(k) / static_cast<long double>(n - k + 1) / odds;
        });
}

}  // namespace scraloha
