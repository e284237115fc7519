#pragma once

// Closed-loop slotted simulation of K-resolution ALOHA with an infinite user
// population. Backlogged users are an anonymous counter N_t; in each slot
//
//   1. the access probability q_t comes from the configured policy,
//   2. C_t ~ Binomial(N_t, q_t) users transmit (drawn first),
//   3. A_t ~ Poisson(lambda K) packets arrive (drawn second),
//   4. S_t = C_t if C_t <= K else 0 users depart,
//   5. N_{t+1} = A_t + N_t - S_t and the estimator sees C_t.
//
// Slot length is K time units, so throughput per unit time is S_t / K.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scraloha/drift.hpp"

namespace scraloha {

struct PseudoBayesianPolicy {};
struct FixedQPolicy {
    double q = 0.0;
};
/// q_t = min{alpha / N_t, 1} from the true backlog.
struct GeniePolicy {};

using QPolicy = std::variant<PseudoBayesianPolicy, FixedQPolicy, GeniePolicy>;

std::string_view policy_name(const QPolicy& policy);

struct SimConfig {
    std::uint32_t K = 1;
    double lambda = 0.0;  // arrival rate per unit time
    std::uint64_t horizon_slots = 1;
    std::uint64_t seed = 0;
    std::uint64_t n0 = 0;  // initial true backlog
    std::optional<double> alpha_override;
    std::optional<double> n_hat0;  // estimator start; lambda K when unset
    QPolicy q_policy = PseudoBayesianPolicy{};

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class OutcomeClass { idle, resolved, unresolvable };

std::string_view to_string(OutcomeClass outcome);
OutcomeClass outcome_from_string(std::string_view text);
OutcomeClass classify(std::uint64_t attempted, std::uint32_t K);

struct SlotOutcome {
    std::uint64_t t = 0;
    std::uint64_t arrivals = 0;   // A_t
    std::uint64_t attempted = 0;  // C_t
    std::uint64_t resolved = 0;   // S_t
    OutcomeClass outcome_class = OutcomeClass::idle;
};

struct SlotRecord {
    std::uint64_t backlog = 0;  // N_t at the start of the slot
    double n_hat = 0.0;         // estimate used for slot t
    double q = 0.0;             // q_t actually applied
    SlotOutcome outcome;
};

struct SimSummary {
    std::uint64_t slots = 0;
    std::uint64_t initial_backlog = 0;
    std::uint64_t final_backlog = 0;
    std::uint64_t total_arrivals = 0;
    std::uint64_t total_resolved = 0;
    double resolved_per_slot = 0.0;
    double resolved_per_second = 0.0;
    double fraction_idle = 0.0;
    double fraction_resolved = 0.0;
    double fraction_unresolvable = 0.0;
    double mean_backlog = 0.0;
    std::uint64_t max_backlog = 0;
    double mean_abs_estimation_error = 0.0;  // mean |n_hat_t - N_t|
    DriftTest backlog_drift;                 // N_t over the last half
    DriftTest estimation_error_drift;        // |n_hat_t - N_t| over the last half
};

struct SimTrace {
    SimConfig config;
    double alpha = 1.0;
    std::vector<SlotRecord> slots;
    std::uint64_t final_backlog = 0;
    bool aborted = false;  // backlog would have exceeded 2^63 - 1
    SimSummary summary;
};

SimTrace run_simulation(const SimConfig& config);

/// Recomputes summary statistics from the slot records.
SimSummary summarize(const SimTrace& trace);

struct ConservationReport {
    bool ok = true;
    std::string message;
};

/// Replays N_{t+1} = A_t + N_t - S_t over the records, checks S_t and the
/// outcome class against C_t, and checks total arrivals = total resolved +
/// final backlog - initial backlog.
ConservationReport check_conservation(const SimTrace& trace);

struct SaturationEstimate {
    double mean_resolved = 0.0;
    double std_error = 0.0;
    // Outcome-class frequencies over the same trials.
    double fraction_idle = 0.0;
    double fraction_unresolvable = 0.0;
};

/// Open-loop Monte-Carlo estimate of E[S]: each trial draws
/// N ~ Poisson(n_fixed), then C ~ Binomial(N, q).
SaturationEstimate run_saturation(std::uint32_t K, std::uint64_t n_fixed, double q,
                                  std::uint64_t trials, std::uint64_t seed);

struct SweepPoint {
    double lambda = 0.0;
    double mean_backlog = 0.0;
    double throughput = 0.0;  // resolved per unit time
    double resolved_per_slot = 0.0;
    double fraction_unresolvable = 0.0;
    DriftTest drift;
    bool unstable = false;  // positive drift or aborted run
};

/// One pseudo-Bayesian run per lambda (empty start, stream i seeded by
/// derive_seed(seed, i)). Runs execute concurrently; output order follows
/// `lambdas`.
std::vector<SweepPoint> sweep_lambda(std::uint32_t K, const std::vector<double>& lambdas,
                                     std::uint64_t horizon, std::uint64_t seed);

}  // namespace scraloha
