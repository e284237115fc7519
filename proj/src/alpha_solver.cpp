#include "scraloha/alpha_solver.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "scraloha/analytics.hpp"
#include "scraloha/csv.hpp"
#include "scraloha/special_functions.hpp"

namespace scraloha {

namespace {

void require_positive_k(std::uint32_t K) {
    if (K == 0) throw std::invalid_argument("alpha solver: K must be >= 1");
}

// Sign of the residual from logs, valid where both terms underflow.
bool residual_positive(std::uint32_t K, double a) {
    const long double log_q = log_regularized_upper_gamma(K, a);
    const long double log_rhs = std::log(static_cast<long double>(K)) + poisson_log_pmf(a, K);
    return log_q > log_rhs;
}

struct Bracket {
    double lo;
    double hi;
};

// r(1) > 0 for K >= 2; r(a) < 0 for every a > K.
Bracket initial_bracket(std::uint32_t K) {
    const double lo = 1.0;
    const double hi = 2.0 * K + 2.0;
    if (residual_positive(K, hi)) {
        throw std::logic_error("alpha solver: no sign change in [1, 2K+2] for K=" +
                               std::to_string(K));
    }
    return {lo, hi};
}

}  // namespace

double alpha_residual(std::uint32_t K, double a) {
    require_positive_k(K);
    return regularized_upper_gamma(K, a) - static_cast<double>(K) * poisson_pmf(a, K);
}

double alpha_residual_derivative(std::uint32_t K, double a) {
    require_positive_k(K);
    const double k = K;
    return -(k + 1.0) * poisson_pmf(a, K - 1) + k * poisson_pmf(a, K);
}

double bisect_alpha(std::uint32_t K, double tolerance) {
    require_positive_k(K);
    if (K == 1) return 1.0;
    auto [lo, hi] = initial_bracket(K);
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (residual_positive(K, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

AlphaSolution solve_alpha_detailed(std::uint32_t K, const AlphaSolverSettings& settings) {
    require_positive_k(K);
    AlphaSolution out;
    if (K == 1) {
        // e^{-a} = a e^{-a} has the single root a = 1.
        out.alpha = out.bracket_estimate = 1.0;
        out.residual = alpha_residual(K, 1.0);
        return out;
    }

    auto [lo, hi] = initial_bracket(K);
    while (hi - lo > settings.bisection_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (residual_positive(K, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.bisection_steps;
    }
    double a = 0.5 * (lo + hi);
    out.bracket_estimate = a;

    for (int i = 0; i < settings.max_newton_steps; ++i) {
        const double r = alpha_residual(K, a);
        if (r == 0.0) break;
        if (r > 0.0) {
            lo = a;
        } else {
            hi = a;
        }
        const double dr = alpha_residual_derivative(K, a);
        double next = a - r / dr;
        ++out.newton_steps;
        if (std::abs(next - a) <= settings.newton_tolerance * std::max(1.0, a)) {
            // Converged; a last step may round just outside the bracket.
            if (next >= lo && next <= hi) a = next;
            break;
        }
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        a = next;
    }
    out.alpha = a;
    out.residual = alpha_residual(K, a);
    return out;
}

double solve_alpha(std::uint32_t K) { return solve_alpha_detailed(K).alpha; }

std::vector<AlphaEntry> design_table(std::uint32_t k_max) {
    if (k_max == 0) throw std::invalid_argument("design_table: K_max must be >= 1");
    std::vector<AlphaEntry> rows;
    rows.reserve(k_max);
    for (std::uint32_t K = 1; K <= k_max; ++K) {
        AlphaEntry e;
        e.K = K;
        e.alpha = solve_alpha(K);
        e.expected_s = expected_resolved({e.alpha, 1.0, K});
        e.expected_t = e.expected_s / K;
        const auto p = outcome_probabilities(K, e.alpha);
        e.p_idle = p.p_idle;
        e.p_unresolvable = p.p_unresolvable;
        rows.push_back(e);
    }
    return rows;
}

void write_design_table_csv(std::ostream& out, const std::vector<AlphaEntry>& rows) {
    out << "K,alpha,E_S,E_T,P_idle,P_unresolvable\n";
    for (const auto& r : rows) {
        out << r.K << ',' << csv::sig6(r.alpha) << ',' << csv::sig6(r.expected_s) << ','
            << csv::sig6(r.expected_t) << ',' << csv::sig6(r.p_idle) << ','
            << csv::sig6(r.p_unresolvable) << '\n';
    }
}

}  // namespace scraloha
