#include "bolab/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "bolab/config.hpp"

namespace bolab {
namespace {

using nlohmann::json;

// JSON has no literal for inf or nan; those travel as strings.
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double to_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("report_from_json: not a number: " + s);
}

json num_array(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

std::vector<double> to_num_array(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(to_num(x));
    return out;
}

json vec_json(const Eigen::VectorXd& v) {
    return num_array(std::vector<double>(v.data(), v.data() + v.size()));
}

Grid1D grid_from_json(const json& j) {
    Grid1D g;
    g.x_min = to_num(j.at("x_min"));
    g.x_max = to_num(j.at("x_max"));
    g.n = j.at("n").get<std::size_t>();
    g.h = to_num(j.at("h"));
    return g;
}

json grid_json(const Grid1D& g) {
    return {{"x_min", num(g.x_min)}, {"x_max", num(g.x_max)}, {"n", g.n}, {"h", num(g.h)}};
}

json uncertainty_json(const UncertaintyResult& u) {
    return {{"sigma_x", num(u.sigma_x)}, {"sigma_p", num(u.sigma_p)}, {"product", num(u.product)},
            {"bound_ok", u.bound_ok}};
}

UncertaintyResult uncertainty_from_json(const json& j) {
    return {to_num(j.at("sigma_x")), to_num(j.at("sigma_p")), to_num(j.at("product")), j.at("bound_ok").get<bool>()};
}

json heavy_json(const HeavyReport& h) {
    return {{"region", {num(h.region.lo), num(h.region.hi)}},
            {"t1_scale", num(h.t1_scale)},
            {"min_gap", num(h.min_gap)},
            {"ratio", num(h.ratio)},
            {"threshold", num(h.threshold)},
            {"heavy_ok", h.heavy_ok},
            {"slices_in_region", h.slices_in_region}};
}

HeavyReport heavy_from_json(const json& j) {
    HeavyReport h;
    h.region = {to_num(j.at("region")[0]), to_num(j.at("region")[1])};
    h.t1_scale = to_num(j.at("t1_scale"));
    h.min_gap = to_num(j.at("min_gap"));
    h.ratio = to_num(j.at("ratio"));
    h.threshold = to_num(j.at("threshold"));
    h.heavy_ok = j.at("heavy_ok").get<bool>();
    h.slices_in_region = j.at("slices_in_region").get<std::size_t>();
    return h;
}

json row_json(const ComparisonRow& r) {
    json states = json::array();
    for (const auto& s : r.states) {
        states.push_back({{"surface", s.surface},
                          {"level", s.level},
                          {"energy", num(s.energy)},
                          {"rayleigh_quotient", num(s.rayleigh_quotient)}});
    }
    json unc = json::array();
    for (const auto& u : r.uncertainty) {
        json e = uncertainty_json(u.result);
        e["label"] = u.label;
        unc.push_back(std::move(e));
    }
    return {{"mass_ratio", num(r.mass_ratio)},
            {"nuclear_mass", num(r.nuclear_mass)},
            {"kappa", num(r.kappa)},
            {"grid1", grid_json(r.grid1)},
            {"grid2", grid_json(r.grid2)},
            {"bo_energy", num(r.bo_energy)},
            {"rayleigh_quotient", num(r.rayleigh_quotient)},
            {"exact_energy", num(r.exact_energy)},
            {"exact_residual", num(r.exact_residual)},
            {"relative_error", num(r.relative_error)},
            {"min_rayleigh_margin", num(r.min_rayleigh_margin)},
            {"states", states},
            {"heavy", heavy_json(r.heavy)},
            {"t1_choice", r.t1_choice},
            {"t1_expectation", num(r.t1_expectation)},
            {"t1_max_over_levels", num(r.t1_max_over_levels)},
            {"adiabatic_residual_max", num(r.adiabatic_residual_max)},
            {"adiabatic_residual_mean", num(r.adiabatic_residual_mean)},
            {"born_huang_expectation", num(r.born_huang_expectation)},
            {"crossing_flags", r.crossing_flags},
            {"degeneracy_flags", r.degeneracy_flags},
            {"boundary_amplitude", num(r.boundary_amplitude)},
            {"uncertainty", unc},
            {"electronic_slice_states", r.electronic_slice_states},
            {"electronic_slice_min_product", num(r.electronic_slice_min_product)},
            {"min_uncertainty_product", num(r.min_uncertainty_product)}};
}

ComparisonRow row_from_json(const json& j) {
    ComparisonRow r;
    r.mass_ratio = to_num(j.at("mass_ratio"));
    r.nuclear_mass = to_num(j.at("nuclear_mass"));
    r.kappa = to_num(j.at("kappa"));
    r.grid1 = grid_from_json(j.at("grid1"));
    r.grid2 = grid_from_json(j.at("grid2"));
    r.bo_energy = to_num(j.at("bo_energy"));
    r.rayleigh_quotient = to_num(j.at("rayleigh_quotient"));
    r.exact_energy = to_num(j.at("exact_energy"));
    r.exact_residual = to_num(j.at("exact_residual"));
    r.relative_error = to_num(j.at("relative_error"));
    r.min_rayleigh_margin = to_num(j.at("min_rayleigh_margin"));
    for (const auto& s : j.at("states")) {
        r.states.push_back({s.at("surface").get<std::size_t>(), s.at("level").get<std::size_t>(),
                            to_num(s.at("energy")), to_num(s.at("rayleigh_quotient"))});
    }
    r.heavy = heavy_from_json(j.at("heavy"));
    r.t1_choice = j.at("t1_choice").get<std::string>();
    r.t1_expectation = to_num(j.at("t1_expectation"));
    r.t1_max_over_levels = to_num(j.at("t1_max_over_levels"));
    r.adiabatic_residual_max = to_num(j.at("adiabatic_residual_max"));
    r.adiabatic_residual_mean = to_num(j.at("adiabatic_residual_mean"));
    r.born_huang_expectation = to_num(j.at("born_huang_expectation"));
    r.crossing_flags = j.at("crossing_flags").get<std::size_t>();
    r.degeneracy_flags = j.at("degeneracy_flags").get<std::size_t>();
    r.boundary_amplitude = to_num(j.at("boundary_amplitude"));
    for (const auto& u : j.at("uncertainty")) {
        r.uncertainty.push_back({u.at("label").get<std::string>(), uncertainty_from_json(u)});
    }
    r.electronic_slice_states = j.at("electronic_slice_states").get<std::size_t>();
    r.electronic_slice_min_product = to_num(j.at("electronic_slice_min_product"));
    r.min_uncertainty_product = to_num(j.at("min_uncertainty_product"));
    return r;
}

json details_json(const CompareDetails& d) {
    json drift = json::array();
    for (const auto& e : d.heff_drift) drift.push_back({{"N", e.rank}, {"lowest", num(e.lowest)}});
    json labels = json::array();
    for (const auto& l : d.t1_labels) labels.push_back({{"surface", l.surface}, {"level", l.level}});
    json matrix = json::array();
    for (Eigen::Index r = 0; r < d.t1_matrix.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < d.t1_matrix.cols(); ++c) row.push_back(num(d.t1_matrix(r, c)));
        matrix.push_back(std::move(row));
    }
    return {{"exact_energies", num_array(d.exact_energies)},
            {"exact_residuals", num_array(d.exact_residuals)},
            {"exact_method", d.exact_method},
            {"projector_rank", d.projector_rank},
            {"heff_energies", num_array(d.heff_energies)},
            {"heff_gap_to_exact", num_array(d.heff_gap_to_exact)},
            {"heff_drift", drift},
            {"t1_coupling",
             {{"labels", labels},
              {"matrix", matrix},
              {"max_off_diagonal", num(d.t1_max_off_diagonal)},
              {"asymmetry", num(d.t1_asymmetry)},
              {"min_adjacent_gap", num(d.min_adjacent_gap)},
              {"coupling_to_gap", num(d.t1_coupling_to_gap)}}},
            {"adiabatic_residual", {{"max", num_array(d.adiabatic_residual_max)},
                                    {"mean", num_array(d.adiabatic_residual_mean)}}}};
}

CompareDetails details_from_json(const json& j) {
    CompareDetails d;
    d.exact_energies = to_num_array(j.at("exact_energies"));
    d.exact_residuals = to_num_array(j.at("exact_residuals"));
    d.exact_method = j.at("exact_method").get<std::string>();
    d.projector_rank = j.at("projector_rank").get<std::size_t>();
    d.heff_energies = to_num_array(j.at("heff_energies"));
    d.heff_gap_to_exact = to_num_array(j.at("heff_gap_to_exact"));
    for (const auto& e : j.at("heff_drift")) d.heff_drift.push_back({e.at("N").get<std::size_t>(), to_num(e.at("lowest"))});
    const json& t1 = j.at("t1_coupling");
    for (const auto& l : t1.at("labels")) {
        d.t1_labels.push_back({l.at("surface").get<std::size_t>(), l.at("level").get<std::size_t>()});
    }
    const json& m = t1.at("matrix");
    const auto rows = static_cast<Eigen::Index>(m.size());
    d.t1_matrix.resize(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < rows; ++c) d.t1_matrix(r, c) = to_num(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    d.t1_max_off_diagonal = to_num(t1.at("max_off_diagonal"));
    d.t1_asymmetry = to_num(t1.at("asymmetry"));
    d.min_adjacent_gap = to_num(t1.at("min_adjacent_gap"));
    d.t1_coupling_to_gap = to_num(t1.at("coupling_to_gap"));
    d.adiabatic_residual_max = to_num_array(j.at("adiabatic_residual").at("max"));
    d.adiabatic_residual_mean = to_num_array(j.at("adiabatic_residual").at("mean"));
    return d;
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string pes_csv(const ElectronicField& field) {
    std::string out = "x1";
    for (std::size_t a = 0; a < field.n_surfaces; ++a) out += fmt::format(",lambda_{}", a);
    out += '\n';
    for (std::size_t i = 0; i < field.grid1.n; ++i) {
        out += format_number(field.grid1.point(i));
        for (std::size_t a = 0; a < field.n_surfaces; ++a) {
            out += ',';
            out += format_number(field.lambdas(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)));
        }
        out += '\n';
    }
    return out;
}

std::string theta_csv(const std::map<std::size_t, NuclearSolution>& nuclear) {
    if (nuclear.empty()) throw std::invalid_argument("theta_csv: no nuclear solutions");
    const Grid1D& grid = nuclear.begin()->second.levels.at(0).theta.grid;
    std::string out = "x1";
    for (const auto& [a, sol] : nuclear) {
        for (std::size_t n = 0; n < sol.levels.size(); ++n) out += fmt::format(",theta_{}_{}", a, n);
    }
    out += '\n';
    for (std::size_t i = 0; i < grid.n; ++i) {
        out += format_number(grid.point(i));
        for (const auto& [a, sol] : nuclear) {
            for (const auto& lvl : sol.levels) {
                out += ',';
                out += format_number(lvl.theta.values[static_cast<Eigen::Index>(i)]);
            }
        }
        out += '\n';
    }
    return out;
}

std::string scaling_csv(const ComparisonReport& report) {
    std::string out = "ratio,kappa,bo_energy,exact_energy,relative_error,heavy_ratio,min_uncertainty_product\n";
    for (const auto& r : report.rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", format_number(r.mass_ratio), format_number(r.kappa),
                           format_number(r.bo_energy), format_number(r.exact_energy), format_number(r.relative_error),
                           format_number(r.heavy.ratio), format_number(r.min_uncertainty_product));
    }
    return out;
}

json bo_energies_json(const std::map<std::size_t, NuclearSolution>& nuclear, const ElectronicField& field,
                      const FullHamiltonian& h) {
    json levels = json::array();
    for (const auto& [a, sol] : nuclear) {
        const double residual_max = field.grid1.n >= 3 ? adiabatic_residual(field, a).max : 0.0;
        for (std::size_t n = 0; n < sol.levels.size(); ++n) {
            const ProductState ps = assemble_product_state(sol, field, n);
            levels.push_back({{"surface", a},
                              {"level", n},
                              {"energy", num(sol.levels[n].energy)},
                              {"rayleigh_quotient", num(rayleigh_quotient(h, ps))},
                              {"residual_max", num(residual_max)}});
        }
    }
    const bool bh = !nuclear.empty() && nuclear.begin()->second.born_huang_included;
    return {{"schema_version", kConfigSchemaVersion},
            {"model", model_to_json(h.spec())},
            {"grid1", grid_json(field.grid1)},
            {"grid2", grid_json(field.grid2)},
            {"born_huang_included", bh},
            {"levels", levels}};
}

json exact_energies_json(const ExactSolution& exact) {
    return {{"schema_version", kConfigSchemaVersion},
            {"k", exact.energies.size()},
            {"energies", vec_json(exact.energies)},
            {"residuals", vec_json(exact.residuals)},
            {"grid1", grid_json(exact.grid1)},
            {"grid2", grid_json(exact.grid2)},
            {"method", exact.method},
            {"iterations", exact.iterations}};
}

json heff_energies_json(const std::vector<EffectiveSolution>& by_rank, const ExactSolution& exact) {
    if (by_rank.empty()) throw std::invalid_argument("heff_energies_json: no effective solutions");
    const EffectiveSolution& last = by_rank.back();
    std::vector<double> gap;
    for (Eigen::Index j = 0; j < last.energies.size() && j < exact.energies.size(); ++j) {
        gap.push_back(last.energies[j] - exact.energies[j]);
    }
    json drift = json::array();
    for (const auto& e : by_rank) drift.push_back({{"N", e.rank}, {"lowest", num(e.energies[0])}});
    return {{"schema_version", kConfigSchemaVersion},
            {"N", last.rank},
            {"subspace_dim", last.subspace_dim},
            {"energies", vec_json(last.energies)},
            {"residuals", vec_json(last.residuals)},
            {"gap_to_exact", num_array(gap)},
            {"exact_energies", vec_json(exact.energies)},
            {"drift", drift}};
}

json report_to_json(const ComparisonReport& report) {
    json rows = json::array();
    std::vector<double> ratios;
    for (const auto& r : report.rows) {
        rows.push_back(row_json(r));
        ratios.push_back(r.mass_ratio);
    }
    json out = {{"schema_version", kConfigSchemaVersion},
                {"family", report.family},
                {"model", model_to_json(report.model)},
                {"seed", report.seed},
                {"mass_ratios", num_array(ratios)},
                {"rows", rows},
                {"error_kappa_slope", report.error_kappa_slope ? num(*report.error_kappa_slope) : json(nullptr)}};
    if (report.details) out["details"] = details_json(*report.details);
    return out;
}

ComparisonReport report_from_json(const json& j) {
    ComparisonReport report;
    report.family = j.at("family").get<std::string>();
    report.model = model_from_json(j.at("model"));
    report.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("rows")) report.rows.push_back(row_from_json(r));
    if (!j.at("error_kappa_slope").is_null()) report.error_kappa_slope = to_num(j.at("error_kappa_slope"));
    if (j.contains("details")) report.details = details_from_json(j.at("details"));
    return report;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

}  // namespace bolab
