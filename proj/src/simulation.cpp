#include "scraloha/simulation.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "scraloha/alpha_solver.hpp"
#include "scraloha/analytics.hpp"
#include "scraloha/estimator.hpp"
#include "scraloha/rng.hpp"

namespace scraloha {

namespace {

constexpr std::uint64_t kBacklogLimit = std::numeric_limits<std::int64_t>::max();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

DriftTest drift_over_last_half(const std::vector<double>& series) {
    const std::size_t half = series.size() / 2;
    return detect_positive_drift(std::span<const double>(series).subspan(half));
}

}  // namespace

std::string_view policy_name(const QPolicy& policy) {
    return std::visit(overloaded{[](const PseudoBayesianPolicy&) { return "pseudo_bayesian"; },
                                 [](const FixedQPolicy&) { return "fixed_q"; },
                                 [](const GeniePolicy&) { return "genie"; }},
                      policy);
}

void SimConfig::validate() const {
    require(K >= 1, "K: must be >= 1");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda: must be finite and >= 0");
    require(horizon_slots >= 1, "horizon_slots: must be >= 1");
    require(n0 <= kBacklogLimit, "n0: exceeds 2^63 - 1");
    if (alpha_override) {
        require(std::isfinite(*alpha_override) && *alpha_override > 0.0,
                "alpha_override: must be finite and > 0");
    }
    if (n_hat0) require(std::isfinite(*n_hat0) && *n_hat0 >= 0.0, "n_hat0: must be finite and >= 0");
    if (const auto* fixed = std::get_if<FixedQPolicy>(&q_policy)) {
        require(fixed->q >= 0.0 && fixed->q <= 1.0, "q_policy.fixed_q: must lie in [0, 1]");
    }
}

std::string_view to_string(OutcomeClass outcome) {
    switch (outcome) {
        case OutcomeClass::idle: return "idle";
        case OutcomeClass::resolved: return "resolved";
        case OutcomeClass::unresolvable: return "unresolvable";
    }
    return "unknown";
}

OutcomeClass outcome_from_string(std::string_view text) {
    if (text == "idle") return OutcomeClass::idle;
    if (text == "resolved") return OutcomeClass::resolved;
    if (text == "unresolvable") return OutcomeClass::unresolvable;
    throw std::invalid_argument("unknown outcome class: " + std::string(text));
}

OutcomeClass classify(std::uint64_t attempted, std::uint32_t K) {
    if (attempted == 0) return OutcomeClass::idle;
    return attempted <= K ? OutcomeClass::resolved : OutcomeClass::unresolvable;
}

SimTrace run_simulation(const SimConfig& config) {
    config.validate();

    SimTrace trace;
    trace.config = config;
    trace.alpha = config.alpha_override.value_or(solve_alpha(config.K));
    trace.slots.reserve(config.horizon_slots);

    const double arrival_mean = config.lambda * config.K;
    EstimatorState estimator = config.n_hat0
                                   ? init_state(config.K, config.lambda, trace.alpha, *config.n_hat0)
                                   : init_state(config.K, config.lambda, trace.alpha);
    Xoshiro256 rng(config.seed);
    std::uint64_t backlog = config.n0;

    for (std::uint64_t t = 0; t < config.horizon_slots; ++t) {
        const double q = std::visit(
            overloaded{[&](const PseudoBayesianPolicy&) { return estimator.q; },
                       [&](const FixedQPolicy& p) { return p.q; },
                       [&](const GeniePolicy&) {
                           return access_probability(trace.alpha, static_cast<double>(backlog));
                       }},
            config.q_policy);

        SlotRecord rec;
        rec.backlog = backlog;
        rec.n_hat = estimator.n_hat;
        rec.q = q;
        rec.outcome.t = t;
        rec.outcome.attempted = sample_binomial(rng, backlog, q);
        rec.outcome.arrivals = sample_poisson(rng, arrival_mean);
        rec.outcome.outcome_class = classify(rec.outcome.attempted, config.K);
        rec.outcome.resolved =
            rec.outcome.outcome_class == OutcomeClass::unresolvable ? 0 : rec.outcome.attempted;

        const std::uint64_t remaining = backlog - rec.outcome.resolved;
        if (rec.outcome.arrivals > kBacklogLimit - remaining) {
            trace.aborted = true;
            break;
        }
        backlog = remaining + rec.outcome.arrivals;
        estimator = update(estimator, rec.outcome.attempted);
        trace.slots.push_back(rec);
    }

    trace.final_backlog = backlog;
    trace.summary = summarize(trace);
    return trace;
}

SimSummary summarize(const SimTrace& trace) {
    SimSummary s;
    s.slots = trace.slots.size();
    s.initial_backlog = trace.config.n0;
    s.final_backlog = trace.final_backlog;
    if (s.slots == 0) return s;

    std::uint64_t idle = 0;
    std::uint64_t resolved_slots = 0;
    std::uint64_t unresolvable = 0;
    double backlog_sum = 0.0;
    double error_sum = 0.0;
    std::vector<double> backlog_series;
    std::vector<double> error_series;
    backlog_series.reserve(s.slots);
    error_series.reserve(s.slots);

    for (const auto& rec : trace.slots) {
        s.total_arrivals += rec.outcome.arrivals;
        s.total_resolved += rec.outcome.resolved;
        switch (rec.outcome.outcome_class) {
            case OutcomeClass::idle: ++idle; break;
            case OutcomeClass::resolved: ++resolved_slots; break;
            case OutcomeClass::unresolvable: ++unresolvable; break;
        }
        const double n = static_cast<double>(rec.backlog);
        const double err = std::abs(rec.n_hat - n);
        backlog_sum += n;
        error_sum += err;
        backlog_series.push_back(n);
        error_series.push_back(err);
        s.max_backlog = std::max(s.max_backlog, rec.backlog);
    }

    const double slots = static_cast<double>(s.slots);
    s.resolved_per_slot = static_cast<double>(s.total_resolved) / slots;
    s.resolved_per_second = s.resolved_per_slot / trace.config.K;
    s.fraction_idle = static_cast<double>(idle) / slots;
    s.fraction_resolved = static_cast<double>(resolved_slots) / slots;
    s.fraction_unresolvable = static_cast<double>(unresolvable) / slots;
    s.mean_backlog = backlog_sum / slots;
    s.mean_abs_estimation_error = error_sum / slots;
    s.backlog_drift = drift_over_last_half(backlog_series);
    s.estimation_error_drift = drift_over_last_half(error_series);
    return s;
}

ConservationReport check_conservation(const SimTrace& trace) {
    auto fail = [](std::string message) { return ConservationReport{false, std::move(message)}; };

    std::uint64_t expected = trace.config.n0;
    std::uint64_t arrivals = 0;
    std::uint64_t resolved = 0;
    for (std::size_t i = 0; i < trace.slots.size(); ++i) {
        const auto& rec = trace.slots[i];
        const auto& o = rec.outcome;
        const std::string at = "slot " + std::to_string(i) + ": ";
        if (o.t != i) return fail(at + "slot index out of sequence");
        if (rec.backlog != expected) return fail(at + "backlog does not follow from previous slot");
        if (o.attempted > rec.backlog) return fail(at + "more transmitters than backlogged users");
        if (o.outcome_class != classify(o.attempted, trace.config.K)) {
            return fail(at + "outcome class inconsistent with multiplicity");
        }
        const std::uint64_t s = o.attempted <= trace.config.K ? o.attempted : 0;
        if (o.resolved != s) return fail(at + "resolved count inconsistent with multiplicity");
        expected = rec.backlog - s + o.arrivals;
        arrivals += o.arrivals;
        resolved += o.resolved;
    }
    if (expected != trace.final_backlog) return fail("final backlog does not follow from last slot");
    // arrivals = resolved + final - initial, rearranged to stay unsigned.
    if (arrivals + trace.config.n0 != resolved + trace.final_backlog) {
        return fail("total arrivals != total resolved + final backlog - initial backlog");
    }
    return {};
}

SaturationEstimate run_saturation(std::uint32_t K, std::uint64_t n_fixed, double q,
                                  std::uint64_t trials, std::uint64_t seed) {
    if (K == 0) throw std::invalid_argument("run_saturation: K must be >= 1");
    if (trials == 0) throw std::invalid_argument("run_saturation: trials must be >= 1");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("run_saturation: q must lie in [0, 1]");

    Xoshiro256 rng(seed);
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t idle = 0;
    std::uint64_t unresolvable = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const std::uint64_t n = sample_poisson(rng, static_cast<double>(n_fixed));
        const std::uint64_t c = sample_binomial(rng, n, q);
        const double s = c <= K ? static_cast<double>(c) : 0.0;
        if (c == 0) ++idle;
        if (c > K) ++unresolvable;
        const double delta = s - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (s - mean);
    }

    SaturationEstimate out;
    out.mean_resolved = mean;
    const double n = static_cast<double>(trials);
    out.std_error = trials > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    out.fraction_idle = static_cast<double>(idle) / n;
    out.fraction_unresolvable = static_cast<double>(unresolvable) / n;
    return out;
}

std::vector<SweepPoint> sweep_lambda(std::uint32_t K, const std::vector<double>& lambdas,
                                     std::uint64_t horizon, std::uint64_t seed) {
    const double alpha = solve_alpha(K);
    std::vector<std::future<SweepPoint>> runs;
    runs.reserve(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        SimConfig cfg;
        cfg.K = K;
        cfg.lambda = lambdas[i];
        cfg.horizon_slots = horizon;
        cfg.seed = derive_seed(seed, i);
        cfg.alpha_override = alpha;
        cfg.validate();
        runs.push_back(std::async(std::launch::async, [cfg] {
            const SimTrace trace = run_simulation(cfg);
            SweepPoint p;
            p.lambda = cfg.lambda;
            p.mean_backlog = trace.summary.mean_backlog;
            p.throughput = trace.summary.resolved_per_second;
            p.resolved_per_slot = trace.summary.resolved_per_slot;
            p.fraction_unresolvable = trace.summary.fraction_unresolvable;
            p.drift = trace.summary.backlog_drift;
            p.unstable = trace.aborted || p.drift.positive_drift;
            return p;
        }));
    }
    std::vector<SweepPoint> out;
    out.reserve(runs.size());
    for (auto& r : runs) out.push_back(r.get());
    return out;
}

}  // namespace scraloha
