#include "flowkl/reports.hpp"

#include "flowkl/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace flowkl {

namespace {

nlohmann::json versioned(const char* kind) {
    return nlohmann::json{{"schema_version", kReportSchemaVersion}, {"report", kind}};
}

} // namespace

nlohmann::json to_json(const NndReport& r) {
    nlohmann::json j = versioned("nnd_check");
    j["min_quadratic_form"] = r.min_quadratic_form;
    j["min_eigenvalue"] = r.min_eigenvalue ? nlohmann::json(*r.min_eigenvalue) : nlohmann::json(nullptr);
    j["kernel_norm"] = r.kernel_norm;
    j["probes"] = r.probes;
    return j;
}

nlohmann::json to_json(const TraceReport& r) {
    nlohmann::json j = versioned("trace_identity");
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["rel_err"] = r.rel_err;
    j["truncated"] = r.truncated;
    j["truncation_deficit"] = r.truncation_deficit;
    return j;
}

nlohmann::json to_json(const CrossValidationReport& r) {
    nlohmann::json j = versioned("cross_validate_paths");
    j["J"] = r.J;
    j["max_eigval_rel_err"] = r.max_eigval_rel_err;
    j["min_abs_alignment"] = r.min_abs_alignment;
    j["simple_count"] = r.simple_count;
    j["max_cluster_angle"] = r.max_cluster_angle;
    j["flagged"] = r.flagged;
    nlohmann::json clusters = nlohmann::json::array();
    for (const EigenCluster& c : r.clusters) {
        clusters.push_back({{"first", c.first + 1},
                            {"last", c.last + 1},
                            {"cut_by_truncation", c.cut_by_truncation},
                            {"principal_angle", c.principal_angle}});
    }
    j["clusters"] = std::move(clusters);
    return j;
}

nlohmann::json to_json(const MercerReport& r) {
    nlohmann::json j = versioned("mercer_convergence");
    j["J_values"] = r.J_values;
    j["residual_sup_trace"] = r.residual_sup_trace;
    j["diag_psd_min_eig"] = r.diag_psd_min_eig;
    j["diag_psd_min_rel"] = r.diag_psd_min_rel;
    j["cs_bound_excess"] = r.cs_bound_excess;
    j["scale"] = r.scale;
    return j;
}

nlohmann::json to_json(const KLReport& r) {
    nlohmann::json j = versioned("uniform_mse_profile");
    j["J_values"] = r.J_values;
    j["mse_profile_sup"] = r.mse_profile_sup;
    j["sup_node"] = r.sup_node;
    if (r.has_mc()) {
        j["mc_mse_sup"] = r.mc_mse_sup;
        j["mc_at_sup_node"] = r.mc_at_sup_node;
        j["mc_std_error_at_sup_node"] = r.mc_std_error_at_sup_node;
        j["mc_agrees"] = r.mc_agrees;
        j["mc_sigmas"] = r.mc_sigmas;
    } else {
        j["mc_mse_sup"] = nullptr;
    }
    j["scale"] = r.scale;
    return j;
}

nlohmann::json to_json(const ScalarComparisonReport& r) {
    nlohmann::json j = versioned("scalar_comparison");
    j["J"] = r.J;
    j["operator_kl_global_mse"] = r.operator_kl_global_mse;
    j["scalar_basis_global_mse"] = r.scalar_basis_global_mse;
    j["fourier_basis_global_mse"] = r.fourier_basis_global_mse;
    j["total_energy"] = r.total_energy;
    return j;
}

nlohmann::json to_json(const FormatReport& r) {
    nlohmann::json j = versioned("validate_file");
    j["valid"] = r.valid;
    j["magic"] = r.magic;
    j["header"] = r.header;
    j["payload_values"] = r.payload_values;
    nlohmann::json issues = nlohmann::json::array();
    for (const FormatIssue& i : r.issues) {
        issues.push_back({{"message", i.message}, {"offset", i.offset}});
    }
    j["issues"] = std::move(issues);
    return j;
}

std::string to_csv(const MercerReport& r) {
    std::ostringstream s;
    s << std::setprecision(17) << "J,residual_sup_trace,diag_psd_min_eig,diag_psd_min_rel,cs_bound_excess\n";
    for (std::size_t a = 0; a < r.J_values.size(); ++a) {
        s << r.J_values[a] << ',' << r.residual_sup_trace[a] << ',' << r.diag_psd_min_eig[a] << ','
          << r.diag_psd_min_rel[a] << ',' << r.cs_bound_excess[a] << '\n';
    }
    return s.str();
}

std::string to_csv(const KLReport& r) {
    std::ostringstream s;
    s << std::setprecision(17) << "J,mse_profile_sup,sup_node";
    if (r.has_mc()) {
        s << ",mc_mse_sup,mc_at_sup_node,mc_std_error_at_sup_node";
    }
    s << '\n';
    for (std::size_t a = 0; a < r.J_values.size(); ++a) {
        s << r.J_values[a] << ',' << r.mse_profile_sup[a] << ',' << r.sup_node[a];
        if (r.has_mc()) {
            s << ',' << r.mc_mse_sup[a] << ',' << r.mc_at_sup_node[a] << ',' << r.mc_std_error_at_sup_node[a];
        }
        s << '\n';
    }
    return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
}

} // namespace flowkl
