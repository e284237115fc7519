#include "scraloha/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scraloha/analytics.hpp"

namespace scraloha {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

EstimatorState init_state(std::uint32_t K, double lambda, double alpha, double n_hat_0) {
    require(K >= 1, "estimator: K must be >= 1");
    require(std::isfinite(lambda) && lambda >= 0.0, "estimator: lambda must be finite and >= 0");
    require(std::isfinite(alpha) && alpha > 0.0, "estimator: alpha must be finite and > 0");
    require(std::isfinite(n_hat_0) && n_hat_0 >= 0.0,
            "estimator: initial n_hat must be finite and >= 0");

    EstimatorState s;
    s.K = K;
    s.alpha = alpha;
    s.lambda_k = lambda * K;
    s.n_hat = n_hat_0;
    s.q = access_probability(alpha, n_hat_0);
    return s;
}

EstimatorState init_state(std::uint32_t K, double lambda, double alpha) {
    return init_state(K, lambda, alpha, lambda * K);
}

EstimatorState update(const EstimatorState& state, std::uint64_t c_observed) {
    EstimatorState next = state;
    if (c_observed <= state.K) {
        next.n_hat = state.lambda_k + std::max(0.0, state.n_hat - state.alpha);
    } else {
        next.n_hat = state.lambda_k + state.n_hat + static_cast<double>(c_observed) - state.alpha;
    }
    next.q = access_probability(next.alpha, next.n_hat);
    return next;
}

nlohmann::json snapshot(const EstimatorState& state, std::uint64_t t) {
    return {{"t", t}, {"n_hat", state.n_hat}, {"q", state.q}};
}

}  // namespace scraloha
