#include "scraloha/sim_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "scraloha/csv.hpp"

namespace scraloha {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* field, bool required) {
    const auto it = j.find(field);
    if (it == j.end()) {
        if (required) throw ConfigError(field, "missing required field");
        return nullptr;
    }
    return &*it;
}

std::uint64_t read_uint(const json& v, const char* field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) throw ConfigError(field, "must be nonnegative");
        return v.get<std::uint64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(field, "expected a nonnegative integer");
}

double read_double(const json& v, const char* field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    return v.get<double>();
}

QPolicy read_policy(const json& v) {
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (name == "pseudo_bayesian") return PseudoBayesianPolicy{};
        if (name == "genie") return GeniePolicy{};
        throw ConfigError("q_policy", "unknown policy '" + name + "'");
    }
    if (v.is_object() && v.size() == 1 && v.contains("fixed_q")) {
        return FixedQPolicy{read_double(v.at("fixed_q"), "q_policy.fixed_q")};
    }
    throw ConfigError("q_policy",
                      R"(expected "pseudo_bayesian", "genie" or {"fixed_q": <probability>})");
}

std::uint64_t parse_uint(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("trace csv: bad integer in column ") + what + ": '" +
                                 s + "'");
    }
    return v;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::runtime_error(std::string("trace csv: bad number in column ") + what + ": '" + s +
                             "'");
}

}  // namespace

SimConfig sim_config_from_json(const json& j, std::uint64_t default_seed) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    static const char* const known[] = {"K",  "lambda",         "horizon_slots", "seed",
                                        "n0", "alpha_override", "n_hat0",        "q_policy"};
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw ConfigError(item.key(), "unknown field");
        }
    }

    SimConfig c;
    const auto k = read_uint(*find(j, "K", true), "K");
    if (k == 0 || k > 0xffffffffULL) throw ConfigError("K", "must be in [1, 2^32)");
    c.K = static_cast<std::uint32_t>(k);
    c.lambda = read_double(*find(j, "lambda", true), "lambda");
    c.horizon_slots = read_uint(*find(j, "horizon_slots", true), "horizon_slots");
    c.seed = default_seed;
    if (const auto* v = find(j, "seed", false)) c.seed = read_uint(*v, "seed");
    if (const auto* v = find(j, "n0", false)) c.n0 = read_uint(*v, "n0");
    if (const auto* v = find(j, "alpha_override", false); v && !v->is_null()) {
        c.alpha_override = read_double(*v, "alpha_override");
    }
    if (const auto* v = find(j, "n_hat0", false); v && !v->is_null()) {
        c.n_hat0 = read_double(*v, "n_hat0");
    }
    if (const auto* v = find(j, "q_policy", false)) c.q_policy = read_policy(*v);

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        throw ConfigError(msg.substr(0, colon), msg.substr(colon == std::string::npos ? 0 : colon + 2));
    }
    return c;
}

json to_json(const SimConfig& c) {
    json j = {{"K", c.K},
              {"lambda", c.lambda},
              {"horizon_slots", c.horizon_slots},
              {"seed", c.seed},
              {"n0", c.n0}};
    j["alpha_override"] = c.alpha_override ? json(*c.alpha_override) : json(nullptr);
    j["n_hat0"] = c.n_hat0 ? json(*c.n_hat0) : json(nullptr);
    if (const auto* fixed = std::get_if<FixedQPolicy>(&c.q_policy)) {
        j["q_policy"] = {{"fixed_q", fixed->q}};
    } else {
        j["q_policy"] = std::string(policy_name(c.q_policy));
    }
    return j;
}

json to_json(const DriftTest& d) {
    return {{"slope", d.slope},
            {"t_stat", std::isfinite(d.t_stat) ? json(d.t_stat) : json(nullptr)},
            {"p_value", d.p_value},
            {"points", d.points},
            {"positive_drift", d.positive_drift}};
}

json to_json(const SimSummary& s) {
    return {{"slots", s.slots},
            {"initial_backlog", s.initial_backlog},
            {"final_backlog", s.final_backlog},
            {"total_arrivals", s.total_arrivals},
            {"total_resolved", s.total_resolved},
            {"resolved_per_slot", s.resolved_per_slot},
            {"resolved_per_second", s.resolved_per_second},
            {"fraction_idle", s.fraction_idle},
            {"fraction_resolved", s.fraction_resolved},
            {"fraction_unresolvable", s.fraction_unresolvable},
            {"mean_backlog", s.mean_backlog},
            {"max_backlog", s.max_backlog},
            {"mean_abs_estimation_error", s.mean_abs_estimation_error},
            {"backlog_drift", to_json(s.backlog_drift)},
            {"estimation_error_drift", to_json(s.estimation_error_drift)}};
}

json summary_json(const SimTrace& trace) {
    return {{"config", to_json(trace.config)},
            {"alpha", trace.alpha},
            {"aborted", trace.aborted},
            {"summary", to_json(trace.summary)}};
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "t,N,n_hat,q,A,C,S,outcome\n";
    for (const auto& r : trace.slots) {
        const auto& o = r.outcome;
        out << o.t << ',' << r.backlog << ',' << csv::sig6(r.n_hat) << ',' << csv::sig6(r.q) << ','
            << o.arrivals << ',' << o.attempted << ',' << o.resolved << ','
            << to_string(o.outcome_class) << '\n';
    }
}

LoadedTrace read_trace_csv(std::istream& in) {
    const auto table = csv::read(in);
    const std::size_t ct = table.column("t"), cn = table.column("N"), cnh = table.column("n_hat"),
                      cq = table.column("q"), ca = table.column("A"), cc = table.column("C"),
                      cs = table.column("S"), co = table.column("outcome");
    LoadedTrace trace;
    trace.slots.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        SlotRecord r;
        r.outcome.t = parse_uint(row[ct], "t");
        r.backlog = parse_uint(row[cn], "N");
        r.n_hat = parse_double(row[cnh], "n_hat");
        r.q = parse_double(row[cq], "q");
        r.outcome.arrivals = parse_uint(row[ca], "A");
        r.outcome.attempted = parse_uint(row[cc], "C");
        r.outcome.resolved = parse_uint(row[cs], "S");
        r.outcome.outcome_class = outcome_from_string(row[co]);
        trace.slots.push_back(r);
    }
    return trace;
}

ConservationReport check_conservation(const LoadedTrace& loaded, std::uint32_t K,
                                      std::optional<std::uint64_t> final_backlog) {
    if (loaded.slots.empty()) return {};
    SimTrace trace;
    trace.config.K = K;
    trace.config.n0 = loaded.slots.front().backlog;
    trace.slots = loaded.slots;
    if (final_backlog) {
        trace.final_backlog = *final_backlog;
    } else {
        const auto& last = loaded.slots.back();
        const std::uint64_t s = last.outcome.attempted <= K ? last.outcome.attempted : 0;
        if (s > last.backlog) return {false, "last slot resolves more users than backlogged"};
        trace.final_backlog = last.backlog - s + last.outcome.arrivals;
    }
    return check_conservation(trace);
}

}  // namespace scraloha
