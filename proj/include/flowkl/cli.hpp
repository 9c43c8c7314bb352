#pragma once

#include "flowkl/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flowkl::cli {

enum class Command { simulate, decompose, mercer_check, kl_check, trace_check, compare_scalar, bench, validate };

std::string to_string(Command c);

/// Exit statuses of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

struct RunConfig {
    Command command = Command::validate;
    std::filesystem::path input;
    /// Generator spec document for `simulate`.
    std::filesystem::path spec;
    /// Empty: a directory named after the config hash in the working directory.
    std::filesystem::path output_dir;

    std::optional<Index> n;
    std::optional<Index> m;
    std::optional<Index> N;
    double domain_length = 1.0;
    std::optional<Index> J;
    std::vector<Index> J_sweep;
    std::optional<std::uint64_t> seed;
    /// decompose: "naive", "svd" or "both".
    std::string path = "both";
    bool center = false;

    double eigval_tol = 1e-10;
    double alignment_tol = 1e-8;
    double angle_tol = 1e-6;
    double cluster_tol = 1e-9;
    double trace_tol = 1e-12;
    double psd_tol = 1e-10;
    double mc_sigmas = 4.0;
    Index mc_replicates = 0;

    std::vector<Index> bench_sweep{64, 128, 256, 512};
    Index bench_reps = 5;
    double min_slope_gap = 1.5;

    unsigned threads = 0;
    bool json_stdout = false;
};

/// The config as JSON, without runtime-only settings (threads, output routing).
nlohmann::json echo(const RunConfig& config);

/// Throws ArgumentError on non-positive parameters or an unsorted sweep.
void validate(const RunConfig& config);

/// Executes one command. Always writes summary.json into the output
/// directory (and to `out` with json_stdout). Returns 0 on success, 1 when a
/// check fails, 2 on input or format errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and calls run. Parse errors exit with 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "1,2,4" -> {1, 2, 4}; an optional "name=" prefix is ignored.
std::vector<Index> parse_index_list(const std::string& text);

} // namespace flowkl::cli
