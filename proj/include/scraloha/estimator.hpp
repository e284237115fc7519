#pragma once

// Receiver-side pseudo-Bayesian backlog tracker for K-resolution ALOHA.
//
// The receiver keeps n_hat, the mean of a Poisson approximation to the
// backlog, and broadcasts q = min{alpha / n_hat, 1}. After observing the
// slot multiplicity c it sets
//
//     n_hat' = lambda K + max{0, n_hat - alpha}    if c <= K
//     n_hat' = lambda K + n_hat + c - alpha        if c >  K
//
// and recomputes q. Idle slots fall in the first branch.

#include <cstdint>

#include <json.hpp>

namespace scraloha {

struct EstimatorState {
    double n_hat = 0.0;
    double alpha = 1.0;
    double lambda_k = 0.0;  // expected arrivals per slot
    std::uint32_t K = 1;
    double q = 1.0;  // access probability for the current slot
};

/// Throws std::invalid_argument on K == 0, non-positive alpha, or negative
/// or non-finite lambda / n_hat_0.
EstimatorState init_state(std::uint32_t K, double lambda, double alpha, double n_hat_0);

/// init_state with n_hat_0 = lambda K.
EstimatorState init_state(std::uint32_t K, double lambda, double alpha);

[[nodiscard]] EstimatorState update(const EstimatorState& state, std::uint64_t c_observed);

/// {"t", "n_hat", "q"} snapshot for trace export.
nlohmann::json snapshot(const EstimatorState& state, std::uint64_t t);

}  // namespace scraloha
