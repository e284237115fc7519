#include "scraloha/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "scraloha/alpha_solver.hpp"
#include "scraloha/special_functions.hpp"

namespace scraloha {

void validate(const ContentionPoint& point) {
    if (!std::isfinite(point.n_hat) || point.n_hat < 0.0) {
        throw std::invalid_argument("contention point: n_hat must be finite and >= 0");
    }
    if (!(point.q >= 0.0 && point.q <= 1.0)) {
        throw std::invalid_argument("contention point: q must lie in [0, 1]");
    }
    if (point.K == 0) throw std::invalid_argument("contention point: K must be >= 1");
}

double expected_resolved(const ContentionPoint& point) {
    validate(point);
    const double g = point.load();
    if (g == 0.0) return 0.0;
    return g * regularized_upper_gamma(point.K, g);
}

double expected_throughput(std::uint32_t K, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("expected_throughput: alpha must be positive");
    }
    return expected_resolved({alpha, 1.0, K}) / K;
}

OutcomeProbabilities outcome_probabilities(std::uint32_t K, double g) {
    if (K == 0) throw std::invalid_argument("outcome_probabilities: K must be >= 1");
    OutcomeProbabilities p;
    p.p_idle = poisson_pmf(g, 0);
    const double at_most_k = poisson_cdf(g, K);
    p.p_resolved = std::max(0.0, at_most_k - p.p_idle);
    p.p_unresolvable = std::max(0.0, 1.0 - at_most_k);
    return p;
}

double posterior_mean(const ContentionPoint& point, std::uint64_t c) {
    validate(point);
    const double remaining = (1.0 - point.q) * point.n_hat;
    return c <= point.K ? remaining : static_cast<double>(c) + remaining;
}

double posterior_pmf(const ContentionPoint& point, std::uint64_t /*c*/, std::uint64_t n) {
    validate(point);
    return poisson_pmf((1.0 - point.q) * point.n_hat, n);
}

double throughput_lower_bound(std::uint32_t K, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("throughput_lower_bound: delta must lie in (0, 1), got " +
                                    std::to_string(delta));
    }
    if (K == 0) throw std::invalid_argument("throughput_lower_bound: K must be >= 1");
    return delta * regularized_upper_gamma(K, delta * K);
}

double access_probability(double alpha, double n_hat) {
    if (n_hat <= alpha) return 1.0;
    return alpha / n_hat;
}

double optimal_q(std::uint32_t K, double n_hat) {
    if (!std::isfinite(n_hat) || n_hat < 0.0) {
        throw std::invalid_argument("optimal_q: n_hat must be finite and >= 0");
    }
    return access_probability(solve_alpha(K), n_hat);
}

}  // namespace scraloha
