#include "scraloha/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "scraloha/alpha_solver.hpp"
#include "scraloha/analytics.hpp"
#include "scraloha/csv.hpp"
#include "scraloha/sim_io.hpp"
#include "scraloha/signature_code.hpp"
#include "scraloha/simulation.hpp"

#include <unistd.h>

namespace scraloha::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json metadata(const std::string& command, json parameters, std::optional<std::uint64_t> seed) {
    json m = {{"artifact_version", kArtifactVersion},
              {"command", command},
              {"parameters", std::move(parameters)}};
    m["seed"] = seed ? json(*seed) : json(nullptr);
    return m;
}

// CSV goes to `out` with metadata in a sidecar; JSON embeds metadata.
void emit(const fs::path& out, Format format, const std::string& csv_body, json json_body,
          const json& meta) {
    if (format == Format::csv) {
        write_file_atomically(out, csv_body);
        write_file_atomically(metadata_path(out), meta.dump(2) + "\n");
    } else {
        json_body["meta"] = meta;
        write_file_atomically(out, json_body.dump(2) + "\n");
    }
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("seed must be an unsigned 64-bit integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_lambda_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& field : csv::split_line(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != field.size() || !std::isfinite(v) || v < 0.0) {
            throw CLI::ValidationError("--lambdas", "'" + field + "' is not a nonnegative number");
        }
        out.push_back(v);
    }
    return out;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace

std::uint64_t default_seed() {
    const char* env = std::getenv(kSeedEnvVar);
    if (env == nullptr || *env == '\0') return kFallbackSeed;
    return parse_seed(env);
}

void write_file_atomically(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << contents;
        f.flush();
        if (!f) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw std::runtime_error("failed writing " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw std::runtime_error("cannot move output into place at " + path.string() + ": " +
                                 ec.message());
    }
}

fs::path metadata_path(const fs::path& out) {
    fs::path p = out;
    p += ".meta.json";
    return p;
}

fs::path summary_path(const fs::path& trace_out) {
    fs::path p = trace_out;
    p += ".summary.json";
    return p;
}

int cmd_alpha_table(std::uint32_t k_max, const fs::path& out, Format format, std::ostream& log) {
    return guarded(log, [&] {
        const auto rows = design_table(k_max);
        std::ostringstream body;
        write_design_table_csv(body, rows);
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"K", r.K},
                         {"alpha", r.alpha},
                         {"E_S", r.expected_s},
                         {"E_T", r.expected_t},
                         {"P_idle", r.p_idle},
                         {"P_unresolvable", r.p_unresolvable}});
        }
        emit(out, format, body.str(), {{"rows", j}},
             metadata("alpha-table", {{"k_max", k_max}}, std::nullopt));
        return static_cast<int>(kSuccess);
    });
}

int cmd_throughput_curve(std::uint32_t k_max, std::optional<double> delta, const fs::path& out,
                         Format format, std::ostream& log) {
    if (delta && !(*delta > 0.0 && *delta < 1.0)) {
        log << "error: --delta must lie in (0, 1)\n";
        return kUsageError;
    }
    if (k_max == 0) {
        log << "error: --k-max must be >= 1\n";
        return kUsageError;
    }
    return guarded(log, [&] {
        std::ostringstream body;
        body << "K,alpha,E_T" << (delta ? ",lower_bound" : "") << '\n';
        json rows = json::array();
        for (std::uint32_t K = 1; K <= k_max; ++K) {
            const double alpha = solve_alpha(K);
            const double t = expected_throughput(K, alpha);
            json row = {{"K", K}, {"alpha", alpha}, {"E_T", t}};
            body << K << ',' << csv::sig6(alpha) << ',' << csv::sig6(t);
            if (delta) {
                const double bound = throughput_lower_bound(K, *delta);
                body << ',' << csv::sig6(bound);
                row["lower_bound"] = bound;
            }
            body << '\n';
            rows.push_back(std::move(row));
        }
        json params = {{"k_max", k_max}};
        params["delta"] = delta ? json(*delta) : json(nullptr);
        emit(out, format, body.str(), {{"rows", rows}},
             metadata("throughput-curve", params, std::nullopt));
        return static_cast<int>(kSuccess);
    });
}

int cmd_outcome_table(std::uint32_t k_max, const fs::path& out, Format format, std::ostream& log) {
    return guarded(log, [&] {
        std::ostringstream body;
        body << "K,alpha,P_idle,P_resolved,P_unresolvable\n";
        json rows = json::array();
        for (const auto& r : design_table(k_max)) {
            const auto p = outcome_probabilities(r.K, r.alpha);
            body << r.K << ',' << csv::sig6(r.alpha) << ',' << csv::sig6(p.p_idle) << ','
                 << csv::sig6(p.p_resolved) << ',' << csv::sig6(p.p_unresolvable) << '\n';
            rows.push_back({{"K", r.K},
                            {"alpha", r.alpha},
                            {"P_idle", p.p_idle},
                            {"P_resolved", p.p_resolved},
                            {"P_unresolvable", p.p_unresolvable}});
        }
        emit(out, format, body.str(), {{"rows", rows}},
             metadata("outcome-table", {{"k_max", k_max}}, std::nullopt));
        return static_cast<int>(kSuccess);
    });
}

int cmd_simulate(const fs::path& config_path, const fs::path& out, std::ostream& log) {
    SimConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) {
            log << "error: cannot read config " << config_path.string() << '\n';
            return kUsageError;
        }
        const json j = json::parse(in);
        config = sim_config_from_json(j, default_seed());
    } catch (const ConfigError& e) {
        log << "error: invalid config field '" << e.field() << "': " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        log << "error: malformed config: " << e.what() << '\n';
        return kUsageError;
    }

    return guarded(log, [&] {
        const SimTrace trace = run_simulation(config);
        std::ostringstream body;
        write_trace_csv(body, trace);
        write_file_atomically(out, body.str());

        json summary = summary_json(trace);
        summary["meta"] = metadata("simulate", to_json(config), config.seed);
        write_file_atomically(summary_path(out), summary.dump(2) + "\n");

        std::ifstream reread(out);
        const auto loaded = read_trace_csv(reread);
        const auto check = check_conservation(loaded, config.K, trace.final_backlog);
        if (!check.ok || loaded.slots.size() != trace.slots.size()) {
            log << "error: trace failed conservation replay: " << check.message << '\n';
            return static_cast<int>(kFailure);
        }
        if (trace.aborted) {
            log << "error: backlog overflow; run aborted after " << trace.slots.size()
                << " slots\n";
            return static_cast<int>(kFailure);
        }
        log << "slots=" << trace.summary.slots
            << " resolved_per_second=" << trace.summary.resolved_per_second
            << " mean_backlog=" << trace.summary.mean_backlog << '\n';
        return static_cast<int>(kSuccess);
    });
}

int cmd_sweep(std::uint32_t K, const std::vector<double>& lambdas, std::uint64_t horizon,
              std::uint64_t seed, const fs::path& out, Format format, std::ostream& log) {
    return guarded(log, [&] {
        const auto points = sweep_lambda(K, lambdas, horizon, seed);
        std::ostringstream body;
        body << "lambda,mean_backlog,throughput_per_second,resolved_per_slot,"
                "fraction_unresolvable,drift_slope,drift_p_value,unstable\n";
        json rows = json::array();
        for (const auto& p : points) {
            body << csv::sig6(p.lambda) << ',' << csv::sig6(p.mean_backlog) << ','
                 << csv::sig6(p.throughput) << ',' << csv::sig6(p.resolved_per_slot) << ','
                 << csv::sig6(p.fraction_unresolvable) << ',' << csv::sig6(p.drift.slope) << ','
                 << csv::sig6(p.drift.p_value) << ',' << (p.unstable ? 1 : 0) << '\n';
            rows.push_back({{"lambda", p.lambda},
                            {"mean_backlog", p.mean_backlog},
                            {"throughput_per_second", p.throughput},
                            {"resolved_per_slot", p.resolved_per_slot},
                            {"fraction_unresolvable", p.fraction_unresolvable},
                            {"drift", to_json(p.drift)},
                            {"unstable", p.unstable}});
        }
        const json params = {{"K", K}, {"lambdas", lambdas}, {"horizon", horizon}};
        emit(out, format, body.str(), {{"rows", rows}}, metadata("sweep", params, seed));
        return static_cast<int>(kSuccess);
    });
}

int cmd_codebook(std::uint32_t M, std::uint32_t K, std::uint32_t q, std::uint64_t seed,
                 const fs::path& out, std::ostream& log) {
    ConstructionReport report;
    try {
        ConstructionOptions options;
        options.seed = seed;
        report = construct_codebook(M, K, q, options);
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConstructionFailure& e) {
        log << "error: " << (e.proven_impossible() ? "no such codebook exists: " : "not found: ")
            << e.what() << '\n';
        return kFailure;
    }
    return guarded(log, [&] {
        json j = to_json(report.book);
        j["meta"] = metadata("codebook", {{"M", M}, {"K", K}, {"q", q}}, seed);
        j["meta"]["winning_seed"] = report.seed;
        j["meta"]["attempts"] = report.attempts;
        j["meta"]["length_symbols"] = report.book.L;
        j["meta"]["length_bits"] = report.bits;
        j["meta"]["bound_bits"] =
            std::isfinite(report.bound_bits) ? json(report.bound_bits) : json(nullptr);
        j["meta"]["approx_bound_bits"] = report.approx_bound_bits;
        write_file_atomically(out, j.dump(2) + "\n");
        log << "L=" << report.book.L << " symbols (" << report.bits << " bits); bound "
            << report.bound_bits << " bits, K*log2(M)=" << report.approx_bound_bits << " bits\n";
        return static_cast<int>(kSuccess);
    });
}

int cmd_verify_codebook(const fs::path& in_path, std::ostream& log) {
    Codebook book;
    try {
        std::ifstream in(in_path);
        if (!in) {
            log << "error: cannot read " << in_path.string() << '\n';
            return kUsageError;
        }
        book = codebook_from_json(json::parse(in));
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
    const auto problems = verify_codebook(book);
    if (!problems.empty()) {
        for (const auto& p : problems) log << "violation: " << p << '\n';
        return kFailure;
    }
    log << "ok: M=" << book.M << " K=" << book.K << " q=" << book.q << " L=" << book.L << '\n';
    return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"K-resolution slotted ALOHA: analytics, simulation and signature codes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kArtifactVersion);

    const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};

    std::uint32_t k_max = 6;
    std::string out_path;
    Format format = Format::csv;
    std::optional<double> delta;

    auto add_table = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--k-max", k_max, "Largest K")->required()->check(CLI::PositiveNumber);
        sub->add_option("--out", out_path, "Output file")->required();
        sub->add_option("--format", format, "csv or json")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        return sub;
    };
    auto* alpha_table = add_table("alpha-table", "Optimal access parameter per K");
    auto* curve = add_table("throughput-curve", "Maximal expected throughput per K");
    curve->add_option("--delta", delta, "Also emit delta*Q(K, delta*K)");
    auto* outcomes = add_table("outcome-table", "Slot outcome probabilities at the optimum");

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Closed-loop simulation from a JSON config");
    simulate->add_option("--config", config_path, "SimConfig JSON")->required();
    simulate->add_option("--out", out_path, "Trace CSV")->required();

    std::uint32_t K = 1;
    std::string lambdas_text;
    std::uint64_t horizon = 100000;
    std::optional<std::uint64_t> seed;
    auto* sweep = app.add_subcommand("sweep", "Stability sweep over arrival rates");
    sweep->add_option("--k", K, "K")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--lambdas", lambdas_text, "Comma-separated arrival rates")->required();
    sweep->add_option("--horizon", horizon, "Slots per run")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "Base seed (default $SCR_ALOHA_SEED)");
    sweep->add_option("--out", out_path, "Output file")->required();
    sweep->add_option("--format", format, "csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    std::uint32_t M = 8;
    std::uint32_t q = 11;
    auto* codebook = app.add_subcommand("codebook", "Search for a signature codebook");
    codebook->add_option("--m", M, "Users")->required();
    codebook->add_option("--k", K, "Resolvable multiplicity")->required();
    codebook->add_option("--q", q, "Prime field size, > M")->required();
    codebook->add_option("--seed", seed, "Search seed (default $SCR_ALOHA_SEED)");
    codebook->add_option("--out", out_path, "Codebook JSON")->required();

    std::string in_path;
    auto* verify = app.add_subcommand("verify-codebook", "Check every codebook invariant");
    verify->add_option("--in", in_path, "Codebook JSON")->required();

    std::vector<double> lambdas;
    try {
        app.parse(argc, argv);
        if (sweep->parsed()) lambdas = parse_lambda_list(lambdas_text);
        if (!seed && (sweep->parsed() || codebook->parsed())) seed = default_seed();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    if (alpha_table->parsed()) return cmd_alpha_table(k_max, out_path, format, err);
    if (curve->parsed()) return cmd_throughput_curve(k_max, delta, out_path, format, err);
    if (outcomes->parsed()) return cmd_outcome_table(k_max, out_path, format, err);
    if (simulate->parsed()) return cmd_simulate(config_path, out_path, err);
    if (sweep->parsed()) return cmd_sweep(K, lambdas, horizon, *seed, out_path, format, err);
    if (codebook->parsed()) return cmd_codebook(M, K, q, *seed, out_path, err);
    if (verify->parsed()) return cmd_verify_codebook(in_path, err);
    return kUsageError;
}

}  // namespace scraloha::cli
