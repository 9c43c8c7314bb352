#include "flowkl/cli.hpp"

#include "flowkl/bench.hpp"
#include "flowkl/covariance.hpp"
#include "flowkl/diagnostics.hpp"
#include "flowkl/error.hpp"
#include "flowkl/generators.hpp"
#include "flowkl/io.hpp"
#include "flowkl/parallel.hpp"
#include "flowkl/random.hpp"
#include "flowkl/reports.hpp"
#include "flowkl/spectral.hpp"
#include "flowkl/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace flowkl::cli {

namespace fs = std::filesystem;

namespace {

/// Thrown for input problems that map to exit status 2.
struct InputError : Error {
    using Error::Error;
};

struct Outcome {
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> failures;
    std::vector<std::string> artifacts;

    void fail_unless(bool ok, const std::string& what) {
        if (!ok) {
            failures.push_back(what);
        }
    }
};

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open spec file '" + path.string() + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("spec file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

LoadedEnsemble load_input(const RunConfig& config) {
    if (config.input.empty()) {
        throw InputError("--input is required for '" + to_string(config.command) + "'");
    }
    if (!fs::exists(config.input)) {
        throw InputError("input file '" + config.input.string() + "' does not exist");
    }
    return read_ensemble(config.input);
}

std::vector<Index> default_sweep(Index full) {
    std::vector<Index> sweep;
    for (Index J = 1; J < full; J *= 2) {
        sweep.push_back(J);
    }
    sweep.push_back(full);
    return sweep;
}

std::vector<Index> resolve_sweep(const RunConfig& config, Index bound) {
    if (config.J_sweep.empty()) {
        return default_sweep(bound);
    }
    if (config.J_sweep.back() > bound) {
        throw ArgumentError("J sweep value " + std::to_string(config.J_sweep.back()) + " exceeds " +
                            std::to_string(bound));
    }
    return config.J_sweep;
}

bool nonincreasing(const std::vector<double>& v, double slack) {
    for (std::size_t a = 1; a < v.size(); ++a) {
        if (v[a] > v[a - 1] + slack) {
            return false;
        }
    }
    return true;
}

void add_artifact(Outcome& o, const fs::path& p) { o.artifacts.push_back(p.filename().string()); }

// simulate -------------------------------------------------------------------

void run_simulate(const RunConfig& config, const fs::path& dir, Outcome& o) {
    nlohmann::json spec = config.spec.empty() ? nlohmann::json::object() : read_json_file(config.spec);
    const std::string generator = spec.value("generator", std::string("separable_brownian"));
    const Index N = config.N.value_or(1000);
    FlowEnsemble ens = [&]() {
        if (generator == "separable_brownian") {
            SeparableBrownianSpec s;
            if (spec.contains("mu")) {
                s.mu = spec["mu"].get<std::vector<double>>();
            } else {
                s.mu = default_mu(config.m.value_or(4));
            }
            const auto m = static_cast<Index>(s.mu.size());
            if (config.m && *config.m != m) {
                throw DimensionError("--m " + std::to_string(*config.m) + " does not match the " +
                                     std::to_string(m) + " mu values of the spec");
            }
            const Grid grid(config.n.value_or(32), config.domain_length);
            s.j_max = spec.value("j_max", grid.n());
            s.seed = config.seed.value_or(spec.value("seed", std::uint64_t{0}));
            spec["mu"] = s.mu;
            spec["j_max"] = s.j_max;
            spec["seed"] = s.seed;
            return generate_separable_brownian(s, grid, BasisTruncation(m), N);
        }
        if (generator == "finite_rank") {
            FiniteRankSpec s;
            s.eigenvalues = spec.at("eigenvalues").get<std::vector<double>>();
            s.coefficient_law = coefficient_law_from_string(spec.value("coefficient_law", std::string("gaussian")));
            s.seed = config.seed.value_or(spec.value("seed", std::uint64_t{0}));
            for (const auto& flow : spec.at("eigenflows")) {
                const auto rows = flow.get<std::vector<std::vector<double>>>();
                if (rows.empty() || rows.front().empty()) {
                    throw ArgumentError("finite-rank eigenflows must be non-empty n x m arrays");
                }
                MatrixXd c(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
                for (std::size_t k = 0; k < rows.size(); ++k) {
                    if (rows[k].size() != rows.front().size()) {
                        throw DimensionError("ragged eigenflow array in spec");
                    }
                    for (std::size_t i = 0; i < rows[k].size(); ++i) {
                        c(static_cast<Index>(k), static_cast<Index>(i)) = rows[k][i];
                    }
                }
                const Grid grid(c.rows(), config.domain_length);
                const BasisTruncation trunc(c.cols());
                s.eigenflows.emplace_back(grid, trunc, std::move(c));
            }
            spec["seed"] = s.seed;
            return generate_finite_rank(s, N);
        }
        throw ArgumentError("unknown generator '" + generator + "'");
    }();

    const fs::path out = dir / "ensemble.flowkl";
    const std::vector<std::byte> bytes =
        encode_ensemble(ens, EnsembleMetadata{spec.value("seed", std::uint64_t{0}), generator});
    write_bytes(out, bytes);
    add_artifact(o, out);
    o.results["generator"] = spec;
    o.results["n"] = ens.grid().n();
    o.results["m"] = ens.trunc().m();
    o.results["N"] = ens.size();
    o.results["checksum_fnv1a64"] = hex64(fnv1a64(bytes));
}

// decompose ------------------------------------------------------------------

void run_decompose(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const FlowEnsemble ens = load_input(config).ensemble;
    const Index bound = std::min(ens.dim(), ens.size());
    const Index J = config.J.value_or(bound);
    if (config.path != "naive" && config.path != "svd" && config.path != "both") {
        throw ArgumentError("--path must be naive, svd or both");
    }
    std::optional<EigenSystem> naive;
    std::optional<double> next;
    if (config.path != "svd") {
        const DiscreteKernel kernel = empirical_operator_kernel(ens, config.center);
        const Index peek = std::min(J + 1, ens.dim());
        const EigenSystem full = naive_eigendecomposition(kernel, peek);
        if (peek > J) {
            next = full.eigenvalues()(J);
        }
        naive.emplace(full.grid(), full.trunc(), full.eigenvalues().head(J), full.eigenflows().leftCols(J));
        write_eigensystem(dir / "eigensystem_naive.flowke", *naive);
        write_eigenvalue_csv(dir / "eigenvalues_naive.csv", *naive);
        add_artifact(o, dir / "eigensystem_naive.flowke");
        add_artifact(o, dir / "eigenvalues_naive.csv");
        o.results["naive_eigenvalues"] = std::vector<double>(naive->eigenvalues().begin(), naive->eigenvalues().end());
        o.results["naive_orthonormality_defect"] = naive->orthonormality_defect();
    }
    if (config.path != "naive") {
        const EigenSystem svd = svd_fast_path(ens, J, config.center);
        write_eigensystem(dir / "eigensystem_svd.flowke", svd);
        write_eigenvalue_csv(dir / "eigenvalues_svd.csv", svd);
        add_artifact(o, dir / "eigensystem_svd.flowke");
        add_artifact(o, dir / "eigenvalues_svd.csv");
        o.results["svd_eigenvalues"] = std::vector<double>(svd.eigenvalues().begin(), svd.eigenvalues().end());
        o.results["svd_orthonormality_defect"] = svd.orthonormality_defect();
        if (naive) {
            const CrossValidationReport report = compare_eigensystems(*naive, svd, config.cluster_tol, next);
            const nlohmann::json j = to_json(report);
            write_text(dir / "cross_validation.json", j.dump(2));
            add_artifact(o, dir / "cross_validation.json");
            o.results["cross_validation"] = j;
            o.fail_unless(report.max_eigval_rel_err <= config.eigval_tol, "eigenvalue paths disagree");
            o.fail_unless(report.min_abs_alignment >= 1.0 - config.alignment_tol, "eigenflow alignment below 1 - tol");
            o.fail_unless(report.max_cluster_angle <= config.angle_tol, "cluster principal angle above tol");
        }
    }
    o.results["J"] = J;
}

// mercer-check ---------------------------------------------------------------

void run_mercer_check(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const FlowEnsemble ens = load_input(config).ensemble;
    const DiscreteKernel kernel = empirical_operator_kernel(ens, config.center);
    const EigenSystem eig = naive_eigendecomposition(kernel, ens.dim());
    const std::vector<Index> sweep = resolve_sweep(config, ens.dim());
    const MercerReport report = mercer_convergence_report(kernel, eig, sweep);

    write_kernel(dir / "kernel.flowkk", kernel);
    write_text(dir / "mercer_report.json", to_json(report).dump(2));
    write_text(dir / "mercer_report.csv", to_csv(report));
    add_artifact(o, dir / "kernel.flowkk");
    add_artifact(o, dir / "mercer_report.json");
    add_artifact(o, dir / "mercer_report.csv");
    o.results["mercer"] = to_json(report);

    const double scale = std::max(report.scale, 1e-300);
    for (std::size_t a = 0; a < sweep.size(); ++a) {
        o.fail_unless(report.diag_psd_min_rel[a] >= -config.psd_tol,
                      "diagonal residual not PSD at J = " + std::to_string(sweep[a]));
        o.fail_unless(report.cs_bound_excess[a] <= config.psd_tol,
                      "partial-sum bound violated at J = " + std::to_string(sweep[a]));
    }
    o.fail_unless(nonincreasing(report.residual_sup_trace, 1e-12 * scale), "residual not monotone in J");
    if (sweep.back() == ens.dim()) {
        o.fail_unless(report.residual_sup_trace.back() <= config.psd_tol * scale, "residual nonzero at full rank");
    }
}

// kl-check -------------------------------------------------------------------

void run_kl_check(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const LoadedEnsemble loaded = load_input(config);
    const FlowEnsemble ens = config.center ? centered(loaded.ensemble) : loaded.ensemble;
    const DiscreteKernel kernel = empirical_operator_kernel(ens);
    const EigenSystem eig = naive_eigendecomposition(kernel, ens.dim());
    const std::vector<Index> sweep = resolve_sweep(config, ens.dim());

    std::optional<FlowEnsemble> fresh;
    if (config.mc_replicates > 0) {
        // Resampling columns draws from the empirical law, whose kernel is `kernel`.
        RandomStream rng(config.seed.value_or(0), 0x6b6c2d6d63ull);
        MatrixXd x(ens.dim(), config.mc_replicates);
        for (Index j = 0; j < config.mc_replicates; ++j) {
            x.col(j) = ens.data().col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(ens.size()))));
        }
        fresh.emplace(ens.grid(), ens.trunc(), std::move(x));
    }
    const KLReport report =
        uniform_mse_profile(kernel, eig, sweep, fresh ? &*fresh : nullptr, config.mc_sigmas);
    write_text(dir / "kl_report.json", to_json(report).dump(2));
    write_text(dir / "kl_report.csv", to_csv(report));
    add_artifact(o, dir / "kl_report.json");
    add_artifact(o, dir / "kl_report.csv");
    o.results["kl"] = to_json(report);

    const double scale = std::max(report.scale, 1e-300);
    o.fail_unless(nonincreasing(report.mse_profile_sup, 1e-12 * scale), "sup MSE profile not monotone in J");
    for (double v : report.mse_profile_sup) {
        o.fail_unless(v >= -config.psd_tol * scale, "negative truncation MSE");
    }
    if (sweep.back() == ens.dim()) {
        o.fail_unless(report.mse_profile_sup.back() <= config.psd_tol * scale, "MSE nonzero at full rank");
    }
    o.fail_unless(report.mc_agrees, "Monte Carlo estimate outside the stated band");
}

// trace-check ----------------------------------------------------------------

void run_trace_check(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const FlowEnsemble ens = load_input(config).ensemble;
    const DiscreteKernel kernel = empirical_operator_kernel(ens, config.center);
    const TraceReport naive = trace_identity(kernel, naive_eigendecomposition(kernel, ens.dim()));
    const TraceReport svd =
        trace_identity(kernel, svd_fast_path(ens, std::min(ens.dim(), ens.size()), config.center));
    const nlohmann::json j{{"naive", to_json(naive)}, {"svd", to_json(svd)}};
    write_text(dir / "trace_report.json", j.dump(2));
    add_artifact(o, dir / "trace_report.json");
    o.results["trace"] = j;
    o.fail_unless(naive.rel_err <= config.trace_tol, "trace identity fails on the naive path");
    // The SVD path covers rank(X) <= min(mn, N); the remaining eigenvalues are zero.
    o.fail_unless(svd.rel_err <= config.trace_tol, "trace identity fails on the SVD path");
}

// compare-scalar -------------------------------------------------------------

void run_compare_scalar(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const LoadedEnsemble loaded = load_input(config);
    const FlowEnsemble ens = config.center ? centered(loaded.ensemble) : loaded.ensemble;
    const Index J = config.J.value_or(std::min<Index>({5, ens.dim(), ens.size()}));
    const ScalarComparisonReport report = scalar_comparison(ens, J);
    write_text(dir / "scalar_comparison.json", to_json(report).dump(2));
    add_artifact(o, dir / "scalar_comparison.json");
    o.results["scalar_comparison"] = to_json(report);
    o.fail_unless(report.operator_kl_global_mse <= report.scalar_basis_global_mse + 1e-10,
                  "operator expansion worse than the scalar-kernel basis");
    o.fail_unless(report.operator_kl_global_mse <= report.fourier_basis_global_mse + 1e-10,
                  "operator expansion worse than the Fourier tensor basis");
}

// bench ----------------------------------------------------------------------

void run_bench(const RunConfig& config, const fs::path& dir, Outcome& o) {
    const BenchResult result =
        bench_paths(config.bench_sweep, config.m.value_or(1), config.N.value_or(32), config.bench_reps,
                    config.seed.value_or(0));
    std::ostringstream table;
    table << "mn,naive_seconds,svd_seconds\n";
    table.precision(9);
    for (const BenchPoint& p : result.points) {
        table << p.mn << ',' << p.naive_seconds << ',' << p.svd_seconds << '\n';
    }
    write_text(dir / "bench.csv", table.str());
    write_text(dir / "bench.json", to_json(result).dump(2));
    add_artifact(o, dir / "bench.csv");
    add_artifact(o, dir / "bench.json");
    o.results["bench"] = to_json(result);
    o.fail_unless(result.slope_gap() >= config.min_slope_gap, "naive/SVD log-log slope gap below threshold");
}

// validate -------------------------------------------------------------------

void run_validate(const RunConfig& config, const fs::path& /*dir*/, Outcome& o) {
    if (config.input.empty() || !fs::exists(config.input)) {
        throw InputError("input file '" + config.input.string() + "' does not exist");
    }
    const FormatReport report = validate_file(config.input);
    o.results["format"] = to_json(report);
    if (!report.valid) {
        const FormatIssue& first = report.issues.front();
        throw FormatError(first.message, first.offset);
    }
}

fs::path resolve_output_dir(const RunConfig& config) {
    if (!config.output_dir.empty()) {
        return config.output_dir;
    }
    const std::string hash = hex64(fnv1a64(echo(config).dump()));
    return fs::path("flowkl-" + to_string(config.command) + "-" + hash.substr(0, 12));
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::simulate:
        return "simulate";
    case Command::decompose:
        return "decompose";
    case Command::mercer_check:
        return "mercer-check";
    case Command::kl_check:
        return "kl-check";
    case Command::trace_check:
        return "trace-check";
    case Command::compare_scalar:
        return "compare-scalar";
    case Command::bench:
        return "bench";
    case Command::validate:
        return "validate";
    }
    return "unknown";
}

nlohmann::json echo(const RunConfig& c) {
    nlohmann::json j;
    j["command"] = to_string(c.command);
    j["input"] = c.input.string();
    j["spec"] = c.spec.string();
    j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
    j["m"] = c.m ? nlohmann::json(*c.m) : nlohmann::json(nullptr);
    j["N"] = c.N ? nlohmann::json(*c.N) : nlohmann::json(nullptr);
    j["domain_length"] = c.domain_length;
    j["J"] = c.J ? nlohmann::json(*c.J) : nlohmann::json(nullptr);
    j["J_sweep"] = c.J_sweep;
    j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
    j["path"] = c.path;
    j["center"] = c.center;
    j["tolerances"] = {{"eigval", c.eigval_tol},   {"alignment", c.alignment_tol}, {"angle", c.angle_tol},
                       {"cluster", c.cluster_tol}, {"trace", c.trace_tol},         {"psd", c.psd_tol},
                       {"mc_sigmas", c.mc_sigmas}};
    j["mc_replicates"] = c.mc_replicates;
    if (c.command == Command::bench) {
        j["bench_sweep"] = c.bench_sweep;
        j["bench_reps"] = c.bench_reps;
        j["min_slope_gap"] = c.min_slope_gap;
    }
    return j;
}

void validate(const RunConfig& c) {
    auto positive = [](const std::optional<Index>& v, const char* name) {
        if (v && *v < 1) {
            throw ArgumentError(std::string(name) + " must be positive");
        }
    };
    positive(c.n, "n");
    positive(c.m, "m");
    positive(c.N, "N");
    positive(c.J, "J");
    if (!(c.domain_length > 0.0)) {
        throw ArgumentError("domain length must be positive");
    }
    for (std::size_t a = 0; a < c.J_sweep.size(); ++a) {
        if (c.J_sweep[a] < 1 || (a > 0 && c.J_sweep[a] <= c.J_sweep[a - 1])) {
            throw ArgumentError("J sweep must be positive and strictly ascending");
        }
    }
    for (double t : {c.eigval_tol, c.alignment_tol, c.angle_tol, c.cluster_tol, c.trace_tol, c.psd_tol, c.mc_sigmas}) {
        if (!(t > 0.0)) {
            throw ArgumentError("tolerances must be positive");
        }
    }
    if (c.mc_replicates < 0 || c.bench_reps < 1) {
        throw ArgumentError("replicate counts must be positive");
    }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    set_max_threads(config.threads);
    nlohmann::json summary;
    summary["schema_version"] = kReportSchemaVersion;
    summary["library_version"] = kVersion;
    summary["config"] = echo(config);
    summary["runtime"] = {{"threads", config.threads}};

    Outcome o;
    int code = kExitOk;
    std::string error;
    fs::path dir;
    try {
        validate(config);
        dir = resolve_output_dir(config);
        fs::create_directories(dir);
        switch (config.command) {
        case Command::simulate:
            run_simulate(config, dir, o);
            break;
        case Command::decompose:
            run_decompose(config, dir, o);
            break;
        case Command::mercer_check:
            run_mercer_check(config, dir, o);
            break;
        case Command::kl_check:
            run_kl_check(config, dir, o);
            break;
        case Command::trace_check:
            run_trace_check(config, dir, o);
            break;
        case Command::compare_scalar:
            run_compare_scalar(config, dir, o);
            break;
        case Command::bench:
            run_bench(config, dir, o);
            break;
        case Command::validate:
            run_validate(config, dir, o);
            break;
        }
        code = o.failures.empty() ? kExitOk : kExitCheckFailed;
    } catch (const std::exception& e) {
        code = kExitInputError;
        error = e.what();
    }

    summary["exit_code"] = code;
    summary["status"] = code == kExitOk ? "ok" : code == kExitCheckFailed ? "check_failed" : "input_error";
    summary["results"] = o.results;
    summary["failures"] = o.failures;
    summary["artifacts"] = o.artifacts;
    if (!error.empty()) {
        summary["error"] = error;
        err << "flowkl " << to_string(config.command) << ": " << error << '\n';
    }
    for (const std::string& f : o.failures) {
        err << "flowkl " << to_string(config.command) << ": check failed: " << f << '\n';
    }

    if (dir.empty()) {
        dir = config.output_dir.empty() ? fs::path("flowkl-" + to_string(config.command) + "-invalid") : config.output_dir;
    }
    try {
        fs::create_directories(dir);
        summary["output_dir"] = dir.string();
        write_text(dir / "summary.json", summary.dump(2));
    } catch (const std::exception& e) {
        err << "flowkl: could not write summary: " << e.what() << '\n';
    }
    if (config.json_stdout) {
        out << summary.dump(2) << '\n';
    }
    return code;
}

std::vector<Index> parse_index_list(const std::string& text) {
    std::string body = text;
    if (const auto eq = body.find('='); eq != std::string::npos) {
        body = body.substr(eq + 1);
    }
    std::vector<Index> values;
    std::stringstream s(body);
    std::string item;
    while (std::getline(s, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw ArgumentError("not an integer: '" + item + "'");
        }
        if (used != item.size()) {
            throw ArgumentError("not an integer: '" + item + "'");
        }
        values.push_back(static_cast<Index>(v));
    }
    if (values.empty()) {
        throw ArgumentError("empty list '" + text + "'");
    }
    return values;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Karhunen-Loeve expansions of Hilbert-space-valued random flows"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig config;
    std::string sweep;
    std::string bench_sweep;
    Index n = 0;
    Index m = 0;
    Index N = 0;
    Index J = 0;
    std::uint64_t seed = 0;

    struct Sub {
        Command command;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {Command::simulate, "simulate", "generate a synthetic ensemble"},
        {Command::decompose, "decompose", "eigendecompose an ensemble by the naive and/or SVD path"},
        {Command::mercer_check, "mercer-check", "Mercer partial-sum convergence report"},
        {Command::kl_check, "kl-check", "uniform truncation-error profile"},
        {Command::trace_check, "trace-check", "trace identity for the empirical kernel"},
        {Command::compare_scalar, "compare-scalar", "operator KL versus scalar-kernel expansion"},
        {Command::bench, "bench", "time the naive and SVD paths"},
        {Command::validate, "validate", "check a binary ensemble/kernel/eigensystem file"},
    };
    std::vector<std::pair<CLI::App*, Command>> apps;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        apps.emplace_back(sub, s.command);
        sub->add_option("-i,--input", config.input, "input file");
        sub->add_option("-o,--out", config.output_dir, "output directory");
        sub->add_option("--threads", config.threads, "worker thread cap (results do not depend on it)");
        sub->add_flag("--json", config.json_stdout, "print the run summary to standard output");
        sub->add_option("--n", n, "grid nodes");
        sub->add_option("--m", m, "basis truncation");
        sub->add_option("--N", N, "sample count");
        sub->add_option("--domain-length", config.domain_length, "length of the index interval");
        sub->add_option("--J", J, "number of components");
        sub->add_option("--J-sweep", sweep, "comma-separated ascending J values");
        sub->add_option("--seed", seed, "random seed");
        sub->add_flag("--center", config.center, "subtract the empirical mean flow");
        sub->add_option("--eigval-tol", config.eigval_tol, "max eigenvalue error relative to lambda_1")->capture_default_str();
        sub->add_option("--alignment-tol", config.alignment_tol, "allowed 1 - |alignment| for simple eigenflows")->capture_default_str();
        sub->add_option("--angle-tol", config.angle_tol, "max principal angle between clustered subspaces")->capture_default_str();
        sub->add_option("--cluster-tol", config.cluster_tol, "relative gap below which eigenvalues form a cluster")->capture_default_str();
        sub->add_option("--trace-tol", config.trace_tol, "relative tolerance of the trace identity")->capture_default_str();
        sub->add_option("--psd-tol", config.psd_tol, "relative slack for PSD and Cauchy-Schwarz checks")->capture_default_str();
        sub->add_option("--mc-sigmas", config.mc_sigmas, "Monte Carlo agreement band in standard errors")->capture_default_str();
        if (s.command == Command::simulate) {
            sub->add_option("--spec", config.spec, "generator spec JSON");
        }
        if (s.command == Command::decompose) {
            sub->add_option("--path", config.path, "naive, svd or both")->check(CLI::IsMember({"naive", "svd", "both"}));
        }
        if (s.command == Command::kl_check) {
            sub->add_option("--mc-replicates", config.mc_replicates, "Monte Carlo resamples");
        }
        if (s.command == Command::bench) {
            sub->add_option("--sweep", bench_sweep, "sizes, e.g. mn=64,128,256,512");
            sub->add_option("--reps", config.bench_reps, "timed repetitions per size (>= 5)");
            sub->add_option("--min-slope-gap", config.min_slope_gap);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests are reported by CLI11 with exit code 0.
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    for (const auto& [sub, command] : apps) {
        if (!sub->parsed()) {
            continue;
        }
        config.command = command;
        if (sub->count("--n") > 0) {
            config.n = n;
        }
        if (sub->count("--m") > 0) {
            config.m = m;
        }
        if (sub->count("--N") > 0) {
            config.N = N;
        }
        if (sub->count("--J") > 0) {
            config.J = J;
        }
        if (sub->count("--seed") > 0) {
            config.seed = seed;
        }
    }
    try {
        if (!sweep.empty()) {
            config.J_sweep = parse_index_list(sweep);
        }
        if (!bench_sweep.empty()) {
            config.bench_sweep = parse_index_list(bench_sweep);
        }
    } catch (const std::exception& e) {
        err << "flowkl: " << e.what() << '\n';
        return kExitInputError;
    }
    return run(config, out, err);
}

} // namespace flowkl::cli
