#pragma once

// Optimal access parameter alpha(K): the positive root of
//     Gamma(K, a) = a^K e^{-a},
// equivalently (K-1)! * sum_{k<K} a^k/k! = a^K. Dividing through by
// (K-1)! e^{a} gives the form the solver works on,
//     r(a) = Q(K, a) - K * P[Poisson(a) = K],
// which stays in range for any K (no factorials, no e^{a}).

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace scraloha {

struct AlphaEntry {
    std::uint32_t K = 0;
    double alpha = 0.0;
    double expected_s = 0.0;      // users resolved per slot
    double expected_t = 0.0;      // users resolved per unit time, expected_s / K
    double p_idle = 0.0;          // P[C = 0]
    double p_unresolvable = 0.0;  // P[C > K]
};

struct AlphaSolverSettings {
    double bisection_tolerance = 1e-6;
    double newton_tolerance = 1e-12;
    int max_newton_steps = 50;
};

/// Diagnostic view of one solve.
struct AlphaSolution {
    double alpha = 0.0;
    double bracket_estimate = 0.0;  // midpoint after the bisection phase
    double residual = 0.0;          // r(alpha)
    int bisection_steps = 0;
    int newton_steps = 0;
};

/// Q(K, a) - a^K e^{-a} / Gamma(K). Positive below the root, negative above.
double alpha_residual(std::uint32_t K, double a);

/// d/da of alpha_residual.
double alpha_residual_derivative(std::uint32_t K, double a);

/// Bracket [1, 2K+2], bisection, then safeguarded Newton polish.
AlphaSolution solve_alpha_detailed(std::uint32_t K, const AlphaSolverSettings& settings = {});

/// Throws std::invalid_argument for K == 0 and std::logic_error if the
/// bracket does not straddle a sign change.
double solve_alpha(std::uint32_t K);

/// Pure bisection to the given width; kept separate from the Newton path so
/// the two can be checked against each other.
double bisect_alpha(std::uint32_t K, double tolerance);

/// Rows for K = 1..k_max, sorted by K.
std::vector<AlphaEntry> design_table(std::uint32_t k_max);

/// CSV with header K,alpha,E_S,E_T,P_idle,P_unresolvable at 6 significant digits.
void write_design_table_csv(std::ostream& out, const std::vector<AlphaEntry>& rows);

}  // namespace scraloha
