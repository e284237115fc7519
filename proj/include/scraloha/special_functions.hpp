#pragma once

// Incomplete-gamma and Poisson kernels for integer shape parameters.
//
// Everything here is built on the identity
//
//     Q(k, x) = Gamma(k, x) / Gamma(k) = sum_{j=0}^{k-1} x^j e^{-x} / j!
//                                     = P[Poisson(x) <= k - 1],
//
// which is exact for integer k. The sum is anchored at its largest term,
// evaluated in log-space in extended precision, and accumulated from the
// smallest terms upward, so neither e^{-x} underflow nor x^j overflow can
// occur for large arguments.

#include <cstdint>

namespace scraloha {

/// Numeric configuration shared by the kernels.
struct SpecialFunctionTolerances {
    /// Terms below this fraction of the anchor term are dropped from sums.
    long double series_cutoff = 1e-22L;
};

inline constexpr SpecialFunctionTolerances kSpecialFunctionTolerances{};

/// Regularized upper incomplete gamma Q(k, x) for integer k >= 1.
/// Throws std::invalid_argument on k == 0 or a negative/non-finite x.
double regularized_upper_gamma(std::uint64_t k, double x);

/// log Q(k, x), finite wherever Q(k, x) > 0 in extended precision, so it
/// keeps its sign information after Q itself underflows in double.
long double log_regularized_upper_gamma(std::uint64_t k, double x);

/// Poisson probability mass P[X = c] for X ~ Poisson(mean).
double poisson_pmf(double mean, std::uint64_t c);

/// log P[X = c]; -inf when the mass is exactly zero.
long double poisson_log_pmf(double mean, std::uint64_t c);

/// P[X <= c] for X ~ Poisson(mean). Equal to Q(c + 1, mean).
double poisson_cdf(double mean, std::uint64_t c);

}  // namespace scraloha
