#pragma once

// File formats for the simulator.
//
// Config JSON mirrors SimConfig:
//   {"K": 1, "lambda": 0.3, "horizon_slots": 100000, "seed": 7, "n0": 0,
//    "alpha_override": 1.0, "n_hat0": 0.3,
//    "q_policy": "pseudo_bayesian" | "genie" | {"fixed_q": 0.1}}
// Only K, lambda and horizon_slots are required.
//
// Trace CSV: t,N,n_hat,q,A,C,S,outcome (floats at 6 significant digits).

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scraloha/simulation.hpp"

namespace scraloha {

/// Malformed configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Parses a config object. When "seed" is absent, `default_seed` is used.
SimConfig sim_config_from_json(const nlohmann::json& j, std::uint64_t default_seed);
nlohmann::json to_json(const SimConfig& config);

nlohmann::json to_json(const DriftTest& drift);
nlohmann::json to_json(const SimSummary& summary);

/// Config, alpha, abort flag and summary at full precision.
nlohmann::json summary_json(const SimTrace& trace);

void write_trace_csv(std::ostream& out, const SimTrace& trace);

/// A trace reloaded from CSV. Floating columns carry 6 significant digits.
struct LoadedTrace {
    std::vector<SlotRecord> slots;
};

LoadedTrace read_trace_csv(std::istream& in);

/// Integer replay over a reloaded trace: consecutive rows satisfy
/// N_{t+1} = A_t + N_t - S_t, S_t and the outcome label agree with C_t.
/// `final_backlog`, when known, also checks the last row.
ConservationReport check_conservation(const LoadedTrace& trace, std::uint32_t K,
                                      std::optional<std::uint64_t> final_backlog = std::nullopt);

}  // namespace scraloha
