#include "scraloha/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace scraloha {

namespace {

void require_finite_nonnegative(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be finite and nonnegative, got " +
                                    std::to_string(x));
    }
}

// Sums a run of terms that shrink monotonically away from the anchor,
// smallest first.
long double sum_ascending(const std::vector<long double>& shrinking) {
    long double acc = 0.0L;
    for (auto it = shrinking.rbegin(); it != shrinking.rend(); ++it) acc += *it;
    return acc;
}

}  // namespace

long double poisson_log_pmf(double mean, std::uint64_t c) {
    require_finite_nonnegative(mean, "Poisson mean");
    if (mean == 0.0) {
        return c == 0 ? 0.0L : -std::numeric_limits<long double>::infinity();
    }
    const long double m = mean;
    const long double n = static_cast<long double>(c);
    return n * std::log(m) - m - std::lgamma(n + 1.0L);
}

double poisson_pmf(double mean, std::uint64_t c) {
    const long double lp = poisson_log_pmf(mean, c);
    return static_cast<double>(std::clamp(std::exp(lp), 0.0L, 1.0L));
}

long double log_regularized_upper_gamma(std::uint64_t k, double x) {
    if (k == 0) throw std::invalid_argument("regularized_upper_gamma: shape k must be >= 1");
    require_finite_nonnegative(x, "regularized_upper_gamma: x");
    if (x == 0.0) return 0.0L;

    // Largest term of sum_{j<k} x^j e^{-x}/j! sits at min(floor(x), k-1).
    const std::uint64_t last = k - 1;
    const std::uint64_t anchor =
        x >= static_cast<double>(last) ? last : static_cast<std::uint64_t>(std::floor(x));

    const long double cutoff = kSpecialFunctionTolerances.series_cutoff;
    const long double lx = x;

    std::vector<long double> below;
    long double term = 1.0L;
    for (std::uint64_t j = anchor; j > 0; --j) {
        term *= static_cast<long double>(j) / lx;
        if (term < cutoff) break;
        below.push_back(term);
    }

    std::vector<long double> above;
    term = 1.0L;
    for (std::uint64_t j = anchor + 1; j <= last; ++j) {
        term *= lx / static_cast<long double>(j);
        if (term < cutoff) break;
        above.push_back(term);
    }

    const long double relative = sum_ascending(below) + sum_ascending(above) + 1.0L;
    return std::min(0.0L, poisson_log_pmf(x, anchor) + std::log(relative));
}

double regularized_upper_gamma(std::uint64_t k, double x) {
    const long double lq = log_regularized_upper_gamma(k, x);
    return static_cast<double>(std::clamp(std::exp(lq), 0.0L, 1.0L));
}

double poisson_cdf(double mean, std::uint64_t c) {
    require_finite_nonnegative(mean, "Poisson mean");
    if (c == std::numeric_limits<std::uint64_t>::max()) return 1.0;
    return regularized_upper_gamma(c + 1, mean);
}

}  // namespace scraloha
