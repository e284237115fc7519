#pragma once

// Closed-form slot statistics under the Poisson-backlog model: the backlog
// N ~ Poisson(n_hat), each backlogged user transmits independently with
// probability q, and a slot resolves every transmitter when at most K of
// them transmit.

#include <cstdint>

namespace scraloha {

struct ContentionPoint {
    double n_hat = 0.0;  // Poisson mean of the backlog
    double q = 0.0;      // access probability
    std::uint32_t K = 1;

    /// Offered load q * n_hat.
    [[nodiscard]] double load() const { return q * n_hat; }
};

/// Throws std::invalid_argument unless n_hat >= 0, q in [0,1], K >= 1.
void validate(const ContentionPoint& point);

struct OutcomeProbabilities {
    double p_idle = 0.0;
    double p_resolved = 0.0;
    double p_unresolvable = 0.0;
};

/// E[S] = g Q(K, g) with g = q n_hat.
double expected_resolved(const ContentionPoint& point);

/// E[T] = alpha Q(K, alpha) / K.
double expected_throughput(std::uint32_t K, double alpha);

/// Distribution of the slot outcome class at offered load g.
OutcomeProbabilities outcome_probabilities(std::uint32_t K, double g);

/// E[N | c transmitted]: (1-q) n_hat when c <= K, c + (1-q) n_hat otherwise.
double posterior_mean(const ContentionPoint& point, std::uint64_t c);

/// P[N = n + c | c transmitted], a Poisson pmf in n with mean (1-q) n_hat.
double posterior_pmf(const ContentionPoint& point, std::uint64_t c, std::uint64_t n);

/// delta * Q(K, delta K). Throws unless 0 < delta < 1.
double throughput_lower_bound(std::uint32_t K, double delta);

/// min{alpha / n_hat, 1}; 1 when n_hat == 0.
double access_probability(double alpha, double n_hat);

/// access_probability(solve_alpha(K), n_hat).
double optimal_q(std::uint32_t K, double n_hat);

}  // namespace scraloha
