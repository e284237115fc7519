#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "scraloha/alpha_solver.hpp"
#include "scraloha/analytics.hpp"

using namespace scraloha;

namespace {

long double poisson_term(long double mean, unsigned n) {
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0L));
}

// Bayes rule with the prior N ~ Poisson(n_hat) and c ~ Binomial(N, q):
// P[N = n + c | c] proportional to C(n+c, c) q^c (1-q)^n P[N = n + c].
long double brute_force_posterior(double n_hat, double q, unsigned c, unsigned n) {
    auto weight = [&](unsigned extra) {
        const unsigned total = extra + c;
        const long double choose =
            std::exp(std::lgamma(total + 1.0L) - std::lgamma(c + 1.0L) - std::lgamma(extra + 1.0L));
        return choose * std::pow(static_cast<long double>(q), c) *
               std::pow(1.0L - q, static_cast<long double>(extra)) * poisson_term(n_hat, total);
    };
    long double norm = 0.0L;
    for (unsigned extra = 0; extra <= 400; ++extra) norm += weight(extra);
    return weight(n) / norm;
}

// Sum over c <= K of c * P[Poisson(g) = c].
double truncated_mean(unsigned K, double g) {
    long double s = 0.0L;
    for (unsigned c = 1; c <= K; ++c) s += c * poisson_term(g, c);
    return static_cast<double>(s);
}

}  // namespace

TEST_CASE("expected_resolved: examples") {
    CHECK(expected_resolved({7.0, 0.0, 3}) == 0.0);
    CHECK(expected_resolved({1.0, 1.0, 1}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    // Frozen from a 40-digit evaluation of g Q(2, g), g = 1.61803.
    CHECK(std::abs(expected_resolved({10.0, 0.161803, 2}) - 0.83996209465364792) < 1e-13);
    CHECK(std::abs(expected_resolved({10.0, 0.161803, 2}) - truncated_mean(2, 1.61803)) < 1e-14);
}

TEST_CASE("expected_resolved equals the truncated Poisson mean") {
    for (unsigned K = 1; K <= 12; ++K) {
        for (double g = 0.05; g < 30.0; g *= 1.4) {
            CHECK(expected_resolved({g, 1.0, K}) ==
                  doctest::Approx(truncated_mean(K, g)).epsilon(1e-12));
        }
    }
}

TEST_CASE("contention point validation") {
    CHECK_THROWS_AS(expected_resolved({-1.0, 0.5, 2}), std::invalid_argument);
    CHECK_THROWS_AS(expected_resolved({1.0, 1.5, 2}), std::invalid_argument);
    CHECK_THROWS_AS(expected_resolved({1.0, 0.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(posterior_mean({1.0, -0.1, 2}, 0), std::invalid_argument);
}

TEST_CASE("expected_throughput: reference points") {
    CHECK(std::abs(expected_throughput(1, 1.0) - 0.367879) < 1e-6);
    CHECK(std::abs(expected_throughput(6, 4.34905) - 0.528031) < 1e-6);
    CHECK(std::abs(expected_throughput(24, solve_alpha(24)) - 0.674985) < 1e-6);
    CHECK_THROWS_AS(expected_throughput(2, 0.0), std::invalid_argument);
}

TEST_CASE("outcome_probabilities: examples and normalization") {
    const auto k1 = outcome_probabilities(1, 1.0);
    CHECK(std::abs(k1.p_idle - 0.3679) < 5e-5);
    CHECK(std::abs(k1.p_unresolvable - 0.2642) < 5e-5);

    const auto k4 = outcome_probabilities(4, 2.94519);
    CHECK(std::abs(k4.p_idle - 0.0526) < 5e-5);
    CHECK(std::abs(k4.p_unresolvable - 0.1756) < 5e-5);

    const auto empty = outcome_probabilities(5, 0.0);
    CHECK(empty.p_idle == 1.0);
    CHECK(empty.p_resolved == 0.0);
    CHECK(empty.p_unresolvable == 0.0);

    for (unsigned K = 1; K <= 20; ++K) {
        for (double g : {0.01, 0.5, 1.0, 3.3, 10.0, 40.0}) {
            const auto p = outcome_probabilities(K, g);
            CHECK(std::abs(p.p_idle + p.p_resolved + p.p_unresolvable - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("posterior_mean: both branches") {
    CHECK(posterior_mean({10.0, 0.1, 2}, 1) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(posterior_mean({10.0, 0.1, 2}, 5) == doctest::Approx(14.0).epsilon(1e-15));
    CHECK(posterior_mean({4.0, 1.0, 2}, 1) == 0.0);
    CHECK(posterior_mean({10.0, 0.1, 2}, 2) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(posterior_mean({10.0, 0.1, 2}, 3) == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("posterior_pmf: examples") {
    CHECK(posterior_pmf({2.0, 0.5, 3}, 0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(posterior_pmf({0.0, 0.3, 3}, 0, 0) == 1.0);
    const double expected = static_cast<double>(poisson_term(9.0L, 9));
    CHECK(posterior_pmf({10.0, 0.1, 2}, 3, 9) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(std::abs(posterior_pmf({10.0, 0.1, 2}, 3, 9) -
                   static_cast<double>(brute_force_posterior(10.0, 0.1, 3, 9))) <= 1e-10);
}

TEST_CASE("posterior_pmf equals the brute-force Bayes ratio") {
    double worst = 0.0;
    for (double n_hat : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        for (double q : {0.05, 0.3, 0.7, 1.0}) {
            for (unsigned c = 0; c <= 10; ++c) {
                for (unsigned n = 0; n <= 60; ++n) {
                    const double ours = posterior_pmf({n_hat, q, 3}, c, n);
                    const double ref = static_cast<double>(brute_force_posterior(n_hat, q, c, n));
                    worst = std::max(worst, std::abs(ours - ref));
                }
            }
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("throughput_lower_bound") {
    CHECK(throughput_lower_bound(1, 0.5) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-14));

    // P[Poisson(delta K) <= K - 1] from boost, scaled by delta.
    auto oracle = [](unsigned K, double delta) {
        return delta * boost::math::gamma_q(static_cast<double>(K), delta * K);
    };
    const double b500 = throughput_lower_bound(500, 0.9);
    CHECK(b500 >= 0.88);
    CHECK(b500 <= 0.90);
    CHECK(std::abs(b500 - oracle(500, 0.9)) < 1e-12);
    const double b2000 = throughput_lower_bound(2000, 0.95);
    CHECK(b2000 >= 0.93);
    CHECK(std::abs(b2000 - oracle(2000, 0.95)) < 1e-12);

    double prev = 0.0;
    for (unsigned K = 1; K <= 3000; K += 7) {
        const double b = throughput_lower_bound(K, 0.9);
        CHECK(b >= prev - 1e-15);
        CHECK(b < 0.9);
        prev = b;
    }
    CHECK_THROWS_AS(throughput_lower_bound(5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(throughput_lower_bound(5, 1.0), std::invalid_argument);
}

TEST_CASE("optimal_q") {
    CHECK(optimal_q(1, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(optimal_q(2, 1.0) == 1.0);
    CHECK(std::abs(optimal_q(5, 36.3955) - 0.1) < 1e-6);
    CHECK(optimal_q(3, 0.0) == 1.0);
    CHECK(access_probability(2.0, 2.0) == 1.0);
}

TEST_CASE("grid maximizer of E[S] over q sits at alpha / n_hat") {
    for (unsigned K = 1; K <= 6; ++K) {
        const double alpha = solve_alpha(K);
        for (double n_hat : {5.0, 20.0, 100.0}) {
            double best_q = 0.0;
            double best = -1.0;
            for (int i = 1; i <= 1000; ++i) {
                const double q = i * 0.001;
                const double s = expected_resolved({n_hat, q, K});
                if (s > best) {
                    best = s;
                    best_q = q;
                }
            }
            CAPTURE(K);
            CAPTURE(n_hat);
            CHECK(std::abs(best_q - alpha / n_hat) <= 0.001);
        }
    }
}

TEST_CASE("dE[S]/dq vanishes at q = alpha / n_hat") {
    for (unsigned K = 1; K <= 6; ++K) {
        const double alpha = solve_alpha(K);
        for (double n_hat : {5.0, 20.0, 100.0}) {
            const double q = alpha / n_hat;
            const double h = 1e-5 * q;
            const double d = (expected_resolved({n_hat, q + h, K}) -
                              expected_resolved({n_hat, q - h, K})) /
                             (2.0 * h);
            CHECK(std::abs(d) <= 1e-6);
        }
    }
}

TEST_CASE("Monte-Carlo resolved counts and outcome frequencies") {
    // Independent sampler: std:: distributions, not the simulator's.
    std::mt19937_64 gen(20240601);
    constexpr int kTrials = 1'000'000;
    for (unsigned K = 1; K <= 6; ++K) {
        const double n_hat = 30.0;
        const double q = solve_alpha(K) / n_hat;
        std::poisson_distribution<long> backlog(n_hat);
        double sum = 0.0;
        double sum_sq = 0.0;
        long idle = 0;
        long unresolvable = 0;
        for (int i = 0; i < kTrials; ++i) {
            std::binomial_distribution<long> tx(backlog(gen), q);
            const long c = tx(gen);
            const double s = c <= static_cast<long>(K) ? c : 0;
            sum += s;
            sum_sq += s * s;
            idle += c == 0;
            unresolvable += c > static_cast<long>(K);
        }
        const double mean = sum / kTrials;
        const double se = std::sqrt((sum_sq / kTrials - mean * mean) / (kTrials - 1));
        CAPTURE(K);
        CHECK(std::abs(mean - expected_resolved({n_hat, q, K})) <= 3.0 * se);

        const auto p = outcome_probabilities(K, q * n_hat);
        const double f_idle = static_cast<double>(idle) / kTrials;
        const double f_unres = static_cast<double>(unresolvable) / kTrials;
        CHECK(std::abs(f_idle - p.p_idle) <= 3.0 * std::sqrt(p.p_idle * (1 - p.p_idle) / kTrials));
        CHECK(std::abs(f_unres - p.p_unresolvable) <=
              3.0 * std::sqrt(p.p_unresolvable * (1 - p.p_unresolvable) / kTrials));
    }
}
