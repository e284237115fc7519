#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "scraloha/alpha_solver.hpp"
#include "scraloha/estimator.hpp"

using namespace scraloha;

TEST_CASE("init_state") {
    const auto a = init_state(1, 0.3, 1.0, 1.0);
    CHECK(a.q == 1.0);
    CHECK(a.lambda_k == doctest::Approx(0.3));

    const auto b = init_state(2, 0.2, 1.61803, 10.0);
    CHECK(b.q == doctest::Approx(0.161803).epsilon(1e-12));
    CHECK(b.lambda_k == doctest::Approx(0.4));

    const auto c = init_state(1, 0.0, 1.0, 0.0);
    CHECK(c.q == 1.0);
    CHECK(c.n_hat == 0.0);

    const auto d = init_state(3, 0.5, 2.26953);
    CHECK(d.n_hat == doctest::Approx(1.5));

    CHECK_THROWS_AS(init_state(0, 0.1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(init_state(1, -0.1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(init_state(1, 0.1, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(init_state(1, 0.1, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("update: examples") {
    EstimatorState s;
    s.K = 1;
    s.alpha = 1.0;
    s.lambda_k = 0.3;
    s.n_hat = 10.0;
    CHECK(update(s, 1).n_hat == doctest::Approx(9.3).epsilon(1e-15));
    CHECK(update(s, 4).n_hat == doctest::Approx(13.3).epsilon(1e-15));

    EstimatorState t;
    t.K = 2;
    t.alpha = 1.61803;
    t.lambda_k = 0.4;
    t.n_hat = 0.5;
    const auto next = update(t, 0);
    CHECK(next.n_hat == 0.4);
    CHECK(next.q == 1.0);
}

TEST_CASE("update reproduces both branches exactly for c in 0..3K") {
    for (std::uint32_t K = 1; K <= 6; ++K) {
        const double alpha = solve_alpha(K);
        for (double n_hat : {0.0, 0.25, alpha, 3.5, 17.0, 250.0}) {
            const auto s = init_state(K, 0.375, alpha, n_hat);
            for (std::uint64_t c = 0; c <= 3 * K; ++c) {
                const auto next = update(s, c);
                const double expected = c <= K ? s.lambda_k + std::max(0.0, n_hat - alpha)
                                               : s.lambda_k + n_hat + static_cast<double>(c) - alpha;
                CHECK(next.n_hat == expected);
                CHECK(next.n_hat >= 0.0);
                CHECK(next.q == (next.n_hat <= alpha ? 1.0 : alpha / next.n_hat));
                CHECK(next.K == K);
                CHECK(next.alpha == alpha);
            }
        }
    }
}

TEST_CASE("update does not mutate its input") {
    const auto s = init_state(2, 0.1, 1.61803, 8.0);
    const auto copy = s;
    (void)update(s, 5);
    CHECK(s.n_hat == copy.n_hat);
    CHECK(s.q == copy.q);
}

TEST_CASE("snapshot fields") {
    const auto s = init_state(2, 0.2, 1.61803, 10.0);
    const auto j = snapshot(s, 42);
    CHECK(j.at("t").get<int>() == 42);
    CHECK(j.at("n_hat").get<double>() == 10.0);
    CHECK(j.at("q").get<double>() == s.q);
    CHECK(j.size() == 3);
}
