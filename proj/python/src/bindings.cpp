#include "flowkl/covariance.hpp"
#include "flowkl/diagnostics.hpp"
#include "flowkl/error.hpp"
#include "flowkl/generators.hpp"
#include "flowkl/io.hpp"
#include "flowkl/reports.hpp"
#include "flowkl/spectral.hpp"
#include "flowkl/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace flowkl;

namespace {

// Reports cross the boundary as plain dicts; the JSON field names are the contract.
py::object to_dict(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_flowkl, mod) {
    mod.doc() = "Karhunen-Loeve expansions of operator-valued covariance kernels on a quadrature grid.";
    mod.attr("__version__") = std::string(kVersion);

    auto base = py::register_exception<Error>(mod, "FlowklError");
    py::register_exception<DimensionError>(mod, "DimensionError", base.ptr());
    py::register_exception<ArgumentError>(mod, "ArgumentError", base.ptr());
    py::register_exception<NotPsdError>(mod, "NotPsdError", base.ptr());
    py::register_exception<RankDeficiencyError>(mod, "RankDeficiencyError", base.ptr());
    py::register_exception<FormatError>(mod, "FormatError", base.ptr());

    py::class_<Grid>(mod, "Grid")
        .def(py::init<Index, double>(), py::arg("n"), py::arg("domain_length") = 1.0)
        .def_property_readonly("n", &Grid::n)
        .def_property_readonly("domain_length", &Grid::domain_length)
        .def_property_readonly("weight", &Grid::weight)
        .def("nodes", &Grid::nodes)
        .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
        .def("__repr__", [](const Grid& g) {
            return "Grid(n=" + std::to_string(g.n()) + ", domain_length=" + std::to_string(g.domain_length()) + ")";
        });

    py::class_<FlowEnsemble>(mod, "FlowEnsemble")
        .def(py::init([](const Grid& g, Index m, MatrixXd data) { return FlowEnsemble(g, BasisTruncation(m), std::move(data)); }),
             py::arg("grid"), py::arg("m"), py::arg("data"))
        .def_property_readonly("grid", &FlowEnsemble::grid)
        .def_property_readonly("m", [](const FlowEnsemble& e) { return e.trunc().m(); })
        .def_property_readonly("data", &FlowEnsemble::data)
        .def_property_readonly("size", &FlowEnsemble::size)
        .def_property_readonly("dim", &FlowEnsemble::dim);

    py::class_<DiscreteKernel>(mod, "DiscreteKernel")
        .def(py::init([](const Grid& g, Index m, MatrixXd a) { return DiscreteKernel(g, BasisTruncation(m), std::move(a)); }),
             py::arg("grid"), py::arg("m"), py::arg("assembly"))
        .def_property_readonly("grid", &DiscreteKernel::grid)
        .def_property_readonly("m", [](const DiscreteKernel& k) { return k.trunc().m(); })
        .def_property_readonly("assembly", &DiscreteKernel::assembly)
        .def("block", [](const DiscreteKernel& k, Index a, Index b) { return MatrixXd(k.block(a, b)); })
        .def("scale", &DiscreteKernel::scale);

    py::class_<EigenSystem>(mod, "EigenSystem")
        .def_property_readonly("grid", &EigenSystem::grid)
        .def_property_readonly("m", [](const EigenSystem& e) { return e.trunc().m(); })
        .def_property_readonly("eigenvalues", &EigenSystem::eigenvalues)
        .def_property_readonly("eigenflows", &EigenSystem::eigenflows)
        .def_property_readonly("count", &EigenSystem::count)
        .def("orthonormality_defect", &EigenSystem::orthonormality_defect);

    mod.def("default_mu", &default_mu, py::arg("m"));
    mod.def("brownian_eigenvalue", &brownian_eigenvalue, py::arg("j"), py::arg("domain_length") = 1.0);
    mod.def(
        "generate_separable_brownian",
        [](const Grid& g, std::vector<double> mu, Index j_max, Index count, std::uint64_t seed) {
            const auto m = static_cast<Index>(mu.size());
            return generate_separable_brownian({std::move(mu), j_max, seed}, g, BasisTruncation(m), count);
        },
        py::arg("grid"), py::arg("mu"), py::arg("j_max"), py::arg("count"), py::arg("seed") = 0);
    mod.def(
        "generate_gaussian_noise",
        [](const Grid& g, Index m, Index count, std::uint64_t seed) {
            return generate_gaussian_noise(g, BasisTruncation(m), count, seed);
        },
        py::arg("grid"), py::arg("m"), py::arg("count"), py::arg("seed") = 0);

    mod.def("empirical_operator_kernel", &empirical_operator_kernel, py::arg("ensemble"), py::arg("center") = false);
    mod.def(
        "separable_brownian_kernel",
        [](const Grid& g, const std::vector<double>& mu) { return separable_brownian_kernel(g, mu); }, py::arg("grid"),
        py::arg("mu"));
    mod.def(
        "truncated_brownian_kernel",
        [](const Grid& g, const std::vector<double>& mu, Index j_max) { return truncated_brownian_kernel(g, mu, j_max); },
        py::arg("grid"), py::arg("mu"), py::arg("j_max"));

    mod.def("naive_eigendecomposition", &naive_eigendecomposition, py::arg("kernel"), py::arg("J"),
            py::arg("negative_tol") = 1e-8);
    mod.def("svd_fast_path", &svd_fast_path, py::arg("ensemble"), py::arg("J"), py::arg("center") = false);
    mod.def(
        "compute_scores", [](const FlowEnsemble& e, const EigenSystem& eig) { return compute_scores(e, eig).values; },
        py::arg("ensemble"), py::arg("eigensystem"));
    mod.def(
        "cross_validate_paths",
        [](const FlowEnsemble& e, Index J, double tol) { return to_dict(to_json(cross_validate_paths(e, J, tol))); },
        py::arg("ensemble"), py::arg("J"), py::arg("cluster_tol") = 1e-9);
    mod.def(
        "trace_identity",
        [](const DiscreteKernel& k, const EigenSystem& eig) { return to_dict(to_json(trace_identity(k, eig))); },
        py::arg("kernel"), py::arg("eigensystem"));
    mod.def(
        "nnd_check",
        [](const DiscreteKernel& k, Index probes, std::uint64_t seed) { return to_dict(to_json(nnd_check(k, probes, seed))); },
        py::arg("kernel"), py::arg("probes") = 64, py::arg("seed") = 0);

    mod.def(
        "mercer_partial_sum", [](const EigenSystem& eig, Index J) { return mercer_partial_sum(eig, J); },
        py::arg("eigensystem"), py::arg("J"));
    mod.def(
        "mercer_report",
        [](const DiscreteKernel& k, const EigenSystem& eig, const std::vector<Index>& J_values) {
            return to_dict(to_json(mercer_convergence_report(k, eig, J_values)));
        },
        py::arg("kernel"), py::arg("eigensystem"), py::arg("J_values"));
    mod.def("truncation_mse_profile", &truncation_mse_profile, py::arg("kernel"), py::arg("eigensystem"), py::arg("J"));
    mod.def(
        "kl_report",
        [](const DiscreteKernel& k, const EigenSystem& eig, const std::vector<Index>& J_values,
           const FlowEnsemble* fresh, double sigmas) {
            return to_dict(to_json(uniform_mse_profile(k, eig, J_values, fresh, sigmas)));
        },
        py::arg("kernel"), py::arg("eigensystem"), py::arg("J_values"), py::arg("fresh") = nullptr,
        py::arg("mc_sigmas") = 4.0);
    mod.def(
        "scalar_comparison",
        [](const FlowEnsemble& e, Index J) { return to_dict(to_json(scalar_comparison(e, J))); }, py::arg("ensemble"),
        py::arg("J"));

    mod.def(
        "write_ensemble",
        [](const std::filesystem::path& p, const FlowEnsemble& e, std::optional<std::uint64_t> seed) {
            write_ensemble(p, e, {seed, std::nullopt});
        },
        py::arg("path"), py::arg("ensemble"), py::arg("seed") = std::nullopt);
    mod.def(
        "read_ensemble", [](const std::filesystem::path& p) { return read_ensemble(p).ensemble; }, py::arg("path"));
    mod.def("write_kernel", &write_kernel, py::arg("path"), py::arg("kernel"));
    mod.def("read_kernel", &read_kernel, py::arg("path"));
    mod.def("write_eigensystem", &write_eigensystem, py::arg("path"), py::arg("eigensystem"));
    mod.def("read_eigensystem", &read_eigensystem, py::arg("path"));
    mod.def(
        "validate_file", [](const std::filesystem::path& p) { return to_dict(to_json(validate_file(p))); },
        py::arg("path"));
}
