#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "bolab/bo.hpp"
#include "bolab/cli.hpp"
#include "bolab/config.hpp"
#include "bolab/diagnostics.hpp"
#include "bolab/errors.hpp"
#include "bolab/exact.hpp"
#include "bolab/io.hpp"
#include "bolab/projection.hpp"

namespace py = pybind11;
using namespace bolab;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

struct NuclearLevels {
    std::size_t surface = 0;
    Eigen::VectorXd energies;
    Eigen::MatrixXd thetas;  // n1 x levels
    Eigen::VectorXd born_huang;
    bool born_huang_included = false;
};

NuclearLevels nuclear_levels(const ElectronicField& field, const ModelSpec& spec, std::size_t a, std::size_t n,
                             bool born_huang) {
    NuclearOptions opt;
    opt.include_born_huang = born_huang;
    const NuclearSolution s = solve_nuclear(field, spec, a, n, opt);
    NuclearLevels out;
    out.surface = a;
    out.energies.resize(static_cast<Eigen::Index>(s.levels.size()));
    out.thetas.resize(static_cast<Eigen::Index>(field.grid1.n), out.energies.size());
    for (std::size_t k = 0; k < s.levels.size(); ++k) {
        out.energies[static_cast<Eigen::Index>(k)] = s.levels[k].energy;
        out.thetas.col(static_cast<Eigen::Index>(k)) = s.levels[k].theta.values;
    }
    out.born_huang = s.born_huang;
    out.born_huang_included = s.born_huang_included;
    return out;
}

}  // namespace

PYBIND11_MODULE(_bolab, m) {
    m.doc() = "Born-Oppenheimer model-molecule laboratory";

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Grid1D>(m, "Grid1D")
        .def_readonly("x_min", &Grid1D::x_min)
        .def_readonly("x_max", &Grid1D::x_max)
        .def_readonly("n", &Grid1D::n)
        .def_readonly("h", &Grid1D::h)
        .def("points", &Grid1D::points)
        .def("__repr__", [](const Grid1D& g) {
            std::ostringstream s;
            s << "Grid1D(x_min=" << g.x_min << ", x_max=" << g.x_max << ", n=" << g.n << ")";
            return s.str();
        });
    m.def("build_grid", &build_grid, py::arg("x_min"), py::arg("x_max"), py::arg("n"));

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_readonly("M", &ModelSpec::M)
        .def_readonly("m", &ModelSpec::m)
        .def_property_readonly("family", [](const ModelSpec& s) { return family_name(s.potential); })
        .def("to_dict", [](const ModelSpec& s) { return to_python(model_to_json(s)); });
    m.def("harmonic", [](double M, double mass, double k1, double k2) {
        ModelSpec s{M, mass, HarmonicCoupling{k1, k2}};
        validate(s);
        return s;
    }, py::arg("M"), py::arg("m") = 1.0, py::arg("k1") = 1.0, py::arg("k2") = 1.0);
    m.def("soft_coulomb", [](double M, double mass, double z, double soft, double k1) {
        ModelSpec s{M, mass, SoftCoulomb{z, soft, k1}};
        validate(s);
        return s;
    }, py::arg("M"), py::arg("m") = 1.0, py::arg("z") = 1.0, py::arg("s") = 1.0, py::arg("k1") = 0.0);
    m.def("separable", [](double M, double mass, double k1, double k2) {
        ModelSpec s{M, mass, SeparableHarmonic{k1, k2}};
        validate(s);
        return s;
    }, py::arg("M"), py::arg("m") = 1.0, py::arg("k1") = 1.0, py::arg("k2") = 1.0);
    m.def("kappa", &kappa, py::arg("spec"));

    py::class_<NormalModeResult>(m, "NormalModes")
        .def_readonly("omega_plus", &NormalModeResult::omega_plus)
        .def_readonly("omega_minus", &NormalModeResult::omega_minus)
        .def_readonly("ground_energy", &NormalModeResult::ground_energy)
        .def("level", &NormalModeResult::level);
    m.def("analytic_normal_modes", &analytic_normal_modes, py::arg("spec"));

    py::class_<ElectronicField>(m, "ElectronicField")
        .def_readonly("grid1", &ElectronicField::grid1)
        .def_readonly("grid2", &ElectronicField::grid2)
        .def_readonly("n_surfaces", &ElectronicField::n_surfaces)
        .def_readonly("lambdas", &ElectronicField::lambdas)
        .def("psi", [](const ElectronicField& f, std::size_t a) { return Eigen::MatrixXd(f.psi.at(a)); })
        .def_property_readonly("flag_count", [](const ElectronicField& f) { return f.flags.size(); });
    m.def("scan_pes", [](const ModelSpec& spec, const Grid1D& g1, const Grid1D& g2, std::size_t surfaces,
                         std::size_t threads) {
        ScanOptions opt;
        opt.threads = threads;
        py::gil_scoped_release release;
        return scan_pes(spec, g1, g2, surfaces, opt);
    }, py::arg("spec"), py::arg("grid1"), py::arg("grid2"), py::arg("n_surfaces"), py::arg("threads") = 1);

    py::class_<NuclearLevels>(m, "NuclearLevels")
        .def_readonly("surface", &NuclearLevels::surface)
        .def_readonly("energies", &NuclearLevels::energies)
        .def_readonly("thetas", &NuclearLevels::thetas)
        .def_readonly("born_huang", &NuclearLevels::born_huang)
        .def_readonly("born_huang_included", &NuclearLevels::born_huang_included);
    m.def("solve_nuclear", &nuclear_levels, py::arg("field"), py::arg("spec"), py::arg("surface"), py::arg("n_levels"),
          py::arg("born_huang") = false);

    py::class_<ExactSolution>(m, "ExactSolution")
        .def_readonly("energies", &ExactSolution::energies)
        .def_readonly("states", &ExactSolution::states)
        .def_readonly("residuals", &ExactSolution::residuals)
        .def_readonly("iterations", &ExactSolution::iterations)
        .def_readonly("method", &ExactSolution::method);
    m.def("solve_exact", [](const ModelSpec& spec, const Grid1D& g1, const Grid1D& g2, std::size_t k,
                            std::uint64_t seed) {
        ExactOptions opt;
        opt.krylov.seed = seed;
        py::gil_scoped_release release;
        return solve_exact(FullHamiltonian(spec, g1, g2), k, opt);
    }, py::arg("spec"), py::arg("grid1"), py::arg("grid2"), py::arg("k") = 1, py::arg("seed") = KrylovOptions{}.seed);

    m.def("effective_energies", [](const ElectronicField& field, const ModelSpec& spec, std::size_t rank, std::size_t k) {
        const FullHamiltonian h(spec, field.grid1, field.grid2);
        return solve_effective(build_projector(field, rank), h, k).energies;
    }, py::arg("field"), py::arg("spec"), py::arg("rank"), py::arg("k") = 1);

    m.def("uncertainty_product", [](const Grid1D& grid, const Eigen::VectorXd& values, bool stencil) {
        const UncertaintyResult r = uncertainty_product(RealGridFunction(grid, values),
                                                        stencil ? MomentumRoute::Stencil : MomentumRoute::Spectral);
        return py::dict(py::arg("sigma_x") = r.sigma_x, py::arg("sigma_p") = r.sigma_p, py::arg("product") = r.product,
                        py::arg("bound_ok") = r.bound_ok);
    }, py::arg("grid"), py::arg("values"), py::arg("stencil") = false);

    m.def("compare", [](const std::string& config_text) {
        const RunConfig c = parse_run_config(config_text);
        nlohmann::json j;
        {
            py::gil_scoped_release release;
            j = report_to_json(compare_report(c.pipeline));
        }
        return to_python(j);
    }, py::arg("config_json"), "Consolidated BO vs exact report for a JSON config string.");
    m.def("scaling", [](const std::string& config_text) {
        const RunConfig c = parse_run_config(config_text);
        nlohmann::json j;
        {
            py::gil_scoped_release release;
            j = report_to_json(kappa_scaling_study(c.pipeline, c.mass_ratios));
        }
        return to_python(j);
    }, py::arg("config_json"), "Mass-ratio sweep over sweep.mass_ratios of a JSON config string.");

    m.def("run", [](const std::string& command, const std::string& config_path, std::optional<std::string> out,
                    std::optional<std::size_t> threads, std::optional<std::uint64_t> seed) {
        RunOverrides o;
        if (out) o.out = *out;
        o.threads = threads;
        o.seed = seed;
        std::ostringstream log;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = run_command(command, config_path, o, log);
        }
        return py::make_tuple(code, log.str());
    }, py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("threads") = py::none(),
       py::arg("seed") = py::none(), "Run a CLI command; returns (exit_code, log).");
}
