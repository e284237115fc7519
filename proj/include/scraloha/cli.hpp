#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scraloha::cli {

/// Process exit codes. Stable for scripting.
enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kFailure = 2,  // numeric, verification or I/O failure
};

enum class Format { csv, json };

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kSeedEnvVar = "SCR_ALOHA_SEED";
inline constexpr std::uint64_t kFallbackSeed = 1;

/// Seed from SCR_ALOHA_SEED, else kFallbackSeed. Throws std::invalid_argument
/// when the variable is set but is not an unsigned integer.
std::uint64_t default_seed();

/// Writes via a sibling temp file and rename. Throws std::runtime_error when
/// the destination cannot be written.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

/// Sidecar written next to every CSV artifact.
std::filesystem::path metadata_path(const std::filesystem::path& out);
std::filesystem::path summary_path(const std::filesystem::path& trace_out);

// Each command writes its artifact and returns an ExitCode; diagnostics go
// to `log`.
int cmd_alpha_table(std::uint32_t k_max, const std::filesystem::path& out, Format format,
                    std::ostream& log);
int cmd_throughput_curve(std::uint32_t k_max, std::optional<double> delta,
                         const std::filesystem::path& out, Format format, std::ostream& log);
int cmd_outcome_table(std::uint32_t k_max, const std::filesystem::path& out, Format format,
                      std::ostream& log);
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out,
                 std::ostream& log);
int cmd_sweep(std::uint32_t K, const std::vector<double>& lambdas, std::uint64_t horizon,
              std::uint64_t seed, const std::filesystem::path& out, Format format,
              std::ostream& log);
int cmd_codebook(std::uint32_t M, std::uint32_t K, std::uint32_t q, std::uint64_t seed,
                 const std::filesystem::path& out, std::ostream& log);
int cmd_verify_codebook(const std::filesystem::path& in, std::ostream& log);

/// Full argument parsing and dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scraloha::cli
