#include "bolab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <fmt/core.h>

#include "bolab/errors.hpp"
#include "bolab/parallel.hpp"
#include "bolab/projection.hpp"

namespace bolab {
namespace {

constexpr double kNormalizationSlack = 1e-8;

// Columns of `re` (and `im`, if non-empty) are independent pure components
// sampled on `grid`, each carrying weight `weight` in the mixture.
struct Moments {
    double mass = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

Eigen::MatrixXd sine_table(Eigen::Index n) {
    const Eigen::Index period = 2 * (n + 1);
    Eigen::VectorXd base(period);
    for (Eigen::Index q = 0; q < period; ++q) {
        base[q] = std::sin(std::numbers::pi * static_cast<double>(q) / static_cast<double>(n + 1));
    }
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) s(k, i) = base[((k + 1) * (i + 1)) % period];
    }
    return s;
}

// int u v' for u, v given by sine coefficients a, b on a box of any length.
double sine_cross_moment(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = a.size();
    double acc = 0.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        for (Eigen::Index l = 1; l <= n; ++l) {
            if ((k + l) % 2 == 0) continue;
            const double kk = static_cast<double>(k);
            const double ll = static_cast<double>(l);
            acc += a[k - 1] * b[l - 1] * 2.0 * kk * ll / (kk * kk - ll * ll);
        }
    }
    return acc;
}

Moments accumulate(const Grid1D& grid, const Eigen::MatrixXd& re, const Eigen::MatrixXd& im, double weight,
                   MomentumRoute route) {
    const Eigen::Index n = re.rows();
    const double h = grid.h;
    const Eigen::VectorXd x = grid.points();
    const bool complex = im.size() != 0;

    Moments m;
    Eigen::VectorXd density = re.rowwise().squaredNorm();
    if (complex) density += im.rowwise().squaredNorm();
    m.mass = weight * h * density.sum();
    m.x1 = weight * h * density.dot(x);
    m.x2 = weight * h * density.dot(x.cwiseProduct(x));

    if (route == MomentumRoute::Spectral) {
        const double length = static_cast<double>(n + 1) * h;
        const Eigen::MatrixXd s = sine_table(n);
        const double scale = 2.0 / static_cast<double>(n + 1);
        const Eigen::MatrixXd cre = scale * (s * re);
        Eigen::VectorXd k2(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double q = static_cast<double>(k + 1) * std::numbers::pi / length;
            k2[k] = q * q;
        }
        m.p2 = weight * 0.5 * length * (k2.transpose() * cre.cwiseAbs2()).sum();
        if (complex) {
            const Eigen::MatrixXd cim = scale * (s * im);
            m.p2 += weight * 0.5 * length * (k2.transpose() * cim.cwiseAbs2()).sum();
            for (Eigen::Index c = 0; c < re.cols(); ++c) {
                m.p1 += weight * 2.0 * sine_cross_moment(cre.col(c), cim.col(c));
            }
        }
        return m;
    }

    const SymTridiagonal d2 = second_derivative_stencil(static_cast<std::size_t>(n), h);
    auto at = [n](const auto& v, Eigen::Index i) { return (i < 0 || i >= n) ? 0.0 : v[i]; };
    for (Eigen::Index c = 0; c < re.cols(); ++c) {
        const Eigen::VectorXd u = re.col(c);
        m.p2 -= weight * h * u.dot(d2.apply(u));
        if (!complex) continue;
        const Eigen::VectorXd v = im.col(c);
        m.p2 -= weight * h * v.dot(d2.apply(v));
        double cross = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            cross += u[i] * (at(v, i + 1) - at(v, i - 1)) - v[i] * (at(u, i + 1) - at(u, i - 1));
        }
        m.p1 += weight * 0.5 * cross;
    }
    return m;
}

UncertaintyResult finish(const Moments& m, const char* who) {
    if (!(std::abs(m.mass - 1.0) <= kNormalizationSlack)) {
        throw std::invalid_argument(fmt::format("{}: state is not normalized (norm^2 = {})", who, m.mass));
    }
    UncertaintyResult out;
    out.sigma_x = std::sqrt(std::max(0.0, m.x2 - m.x1 * m.x1));
    out.sigma_p = std::sqrt(std::max(0.0, m.p2 - m.p1 * m.p1));
    out.product = out.sigma_x * out.sigma_p;
    out.bound_ok = out.product >= kUncertaintyFloor;
    return out;
}

double t1_expectation_of(const RealGridFunction& theta, double nuclear_mass) {
    const SymTridiagonal d2 = second_derivative_matrix(theta.grid);
    return -0.5 / nuclear_mass * theta.grid.h * theta.values.dot(d2.apply(theta.values));
}

}  // namespace

UncertaintyResult uncertainty_product(const RealGridFunction& f, MomentumRoute route) {
    return finish(accumulate(f.grid, f.values, Eigen::MatrixXd(), 1.0, route), "uncertainty_product");
}

UncertaintyResult uncertainty_product(const ComplexGridFunction& f, MomentumRoute route) {
    const Eigen::MatrixXd re = f.values.real();
    const Eigen::MatrixXd im = f.values.imag();
    return finish(accumulate(f.grid, re, im, 1.0, route), "uncertainty_product");
}

UncertaintyResult nuclear_uncertainty(const ProductState& state, MomentumRoute route) {
    // Column j of the amplitudes is one pure x1 component with weight h2.
    const Eigen::MatrixXd columns = state.amplitudes;
    return finish(accumulate(state.grid1, columns, Eigen::MatrixXd(), state.grid2.h, route), "nuclear_uncertainty");
}

UncertaintyResult electronic_uncertainty(const ProductState& state, MomentumRoute route) {
    const Eigen::MatrixXd columns = state.amplitudes.transpose();
    return finish(accumulate(state.grid2, columns, Eigen::MatrixXd(), state.grid1.h, route),
                  "electronic_uncertainty");
}

std::string t1_choice_name(T1Choice choice) {
    switch (choice) {
        case T1Choice::Fixed: return "fixed";
        case T1Choice::Spacing: return "auto";
        case T1Choice::Expectation: return "expectation";
        case T1Choice::LevelMax: return "level_max";
    }
    return "unknown";
}

double surface_stiffness(const ModelSpec& spec, const Grid1D& grid2) {
    validate(spec);
    if (std::holds_alternative<HarmonicCoupling>(spec.potential) ||
        std::holds_alternative<SeparableHarmonic>(spec.potential)) {
        return closed_form_surface_stiffness(spec);
    }
    const double d = grid2.h;
    const double lo = solve_clamped_slice(spec, grid2, -d, 1).energies[0];
    const double mid = solve_clamped_slice(spec, grid2, 0.0, 1).energies[0];
    const double hi = solve_clamped_slice(spec, grid2, d, 1).energies[0];
    return (lo - 2.0 * mid + hi) / (d * d);
}

double nuclear_rms_width(const ModelSpec& spec, const Grid1D& grid2) {
    const double k = surface_stiffness(spec, grid2);
    if (!(k > 0.0)) {
        throw std::invalid_argument(
            fmt::format("nuclear width undefined: lowest surface has curvature {} at x1 = 0", k));
    }
    return 1.0 / std::sqrt(2.0 * std::sqrt(k * spec.M));
}

Grid1D resolve_nuclear_grid(const PipelineSettings& settings, const ModelSpec& spec) {
    if (settings.grid1.fixed) return *settings.grid1.fixed;
    const double half = settings.grid1.half_width_in_widths * nuclear_rms_width(spec, settings.grid2);
    return build_grid(-half, half, settings.grid1.n);
}

Interval resolve_heavy_region(const PipelineSettings& settings, const ModelSpec& spec, const Grid1D& grid1) {
    if (settings.heavy.region) return *settings.heavy.region;
    const double half = settings.heavy.region_widths * nuclear_rms_width(spec, settings.grid2);
    return {std::max(-half, grid1.x_min), std::min(half, grid1.x_max)};
}

double harmonic_level_spacing(const ModelSpec& spec) {
    validate(spec);
    if (!(std::holds_alternative<HarmonicCoupling>(spec.potential) ||
          std::holds_alternative<SeparableHarmonic>(spec.potential))) {
        throw std::invalid_argument("closed-form nuclear level spacing needs a harmonic family");
    }
    const double k1 = closed_form_surface_stiffness(spec);
    if (!(k1 > 0.0)) throw std::invalid_argument("closed-form nuclear level spacing needs k1 > 0");
    return std::sqrt(k1 / spec.M);
}

std::optional<double> error_kappa_slope(const std::vector<ComparisonRow>& rows) {
    if (rows.size() < 2) return std::nullopt;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        if (!(r.relative_error > 0.0) || !(r.kappa > 0.0)) return std::nullopt;
        const double x = std::log(r.kappa);
        const double y = std::log(r.relative_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

namespace {

ComparisonRow compute_row(const PipelineSettings& s, const ModelSpec& spec, std::size_t threads,
                          CompareDetails* details) {
    if (s.n_surfaces < 2) throw std::invalid_argument("comparison needs at least two surfaces");
    ComparisonRow row;
    row.mass_ratio = spec.M / spec.m;
    row.nuclear_mass = spec.M;
    row.kappa = kappa(spec);
    row.grid1 = resolve_nuclear_grid(s, spec);
    row.grid2 = s.grid2;

    ScanOptions scan;
    scan.threads = threads;
    const ElectronicField field = scan_pes(spec, row.grid1, row.grid2, s.n_surfaces, scan);
    for (const auto& f : field.flags) {
        if (f.kind == SliceFlag::Kind::Crossing) ++row.crossing_flags;
        else ++row.degeneracy_flags;
    }

    const std::size_t levels = std::min(std::max<std::size_t>(s.nuclear_levels, 1), row.grid1.n);
    NuclearOptions nopt;
    nopt.include_born_huang = s.born_huang;
    std::map<std::size_t, NuclearSolution> nuclear;
    for (std::size_t a = 0; a < s.n_surfaces; ++a) nuclear.emplace(a, solve_nuclear(field, spec, a, levels, nopt));

    const FullHamiltonian h(spec, row.grid1, row.grid2);
    const std::size_t k_exact = std::clamp<std::size_t>(s.exact_levels, 1, kMaxExactLevels);
    const ExactSolution exact = solve_exact(h, k_exact, s.exact);
    row.exact_energy = exact.energies[0];
    row.exact_residual = exact.residuals.maxCoeff();

    row.min_uncertainty_product = std::numeric_limits<double>::infinity();
    auto record = [&row](std::string label, const UncertaintyResult& u) {
        row.min_uncertainty_product = std::min(row.min_uncertainty_product, u.product);
        row.uncertainty.push_back({std::move(label), u});
    };

    row.min_rayleigh_margin = std::numeric_limits<double>::infinity();
    for (const auto& [a, sol] : nuclear) {
        for (std::size_t n = 0; n < sol.levels.size(); ++n) {
            const ProductState ps = assemble_product_state(sol, field, n);
            const double rq = rayleigh_quotient(h, ps);
            row.states.push_back({a, n, sol.levels[n].energy, rq});
            row.min_rayleigh_margin = std::min(row.min_rayleigh_margin, rq - row.exact_energy);
            record(fmt::format("theta[{},{}]", a, n), uncertainty_product(sol.levels[n].theta));
            record(fmt::format("nuclear_reduced[{},{}]", a, n), nuclear_uncertainty(ps));
        }
    }
    row.bo_energy = nuclear.at(0).levels[0].energy;
    row.rayleigh_quotient = row.states.front().rayleigh_quotient;
    row.relative_error = std::abs(row.rayleigh_quotient - row.exact_energy) / std::abs(row.exact_energy);

    row.electronic_slice_min_product = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < s.n_surfaces; ++a) {
        for (std::size_t i = 0; i < row.grid1.n; ++i) {
            const auto u = uncertainty_product(field.slice_state(a, i));
            row.electronic_slice_min_product = std::min(row.electronic_slice_min_product, u.product);
            ++row.electronic_slice_states;
        }
    }
    row.min_uncertainty_product = std::min(row.min_uncertainty_product, row.electronic_slice_min_product);

    const auto& ground = nuclear.at(0);
    row.t1_expectation = t1_expectation_of(ground.levels[0].theta, spec.M);
    row.t1_max_over_levels = 0.0;
    for (const auto& lvl : ground.levels) {
        row.t1_max_over_levels = std::max(row.t1_max_over_levels, t1_expectation_of(lvl.theta, spec.M));
    }
    double t1 = 0.0;
    switch (s.heavy.t1_choice) {
        case T1Choice::Fixed: t1 = s.heavy.t1_value; break;
        case T1Choice::Spacing: t1 = harmonic_level_spacing(spec); break;
        case T1Choice::Expectation: t1 = row.t1_expectation; break;
        case T1Choice::LevelMax: t1 = row.t1_max_over_levels; break;
    }
    row.t1_choice = t1_choice_name(s.heavy.t1_choice);
    row.heavy = heavy_gap_report(field, resolve_heavy_region(s, spec, row.grid1), t1, s.heavy.ratio_threshold);

    const AdiabaticResidual adiabatic = adiabatic_residual(field, 0);
    row.adiabatic_residual_max = adiabatic.max;
    row.adiabatic_residual_mean = adiabatic.mean;
    const Eigen::VectorXd& theta0 = ground.levels[0].theta.values;
    row.born_huang_expectation = row.grid1.h * theta0.cwiseAbs2().dot(ground.born_huang);

    {
        const Eigen::Map<const RowMatrix> psi(exact.states.col(0).data(), static_cast<Eigen::Index>(row.grid1.n),
                                              static_cast<Eigen::Index>(row.grid2.n));
        const double peak = psi.cwiseAbs().maxCoeff();
        const Eigen::Index last1 = psi.rows() - 1;
        const Eigen::Index last2 = psi.cols() - 1;
        const double edge = std::max({psi.row(0).cwiseAbs().maxCoeff(), psi.row(last1).cwiseAbs().maxCoeff(),
                                      psi.col(0).cwiseAbs().maxCoeff(), psi.col(last2).cwiseAbs().maxCoeff()});
        row.boundary_amplitude = edge / peak;
    }

    if (details == nullptr) return row;

    CompareDetails& d = *details;
    d.exact_energies.assign(exact.energies.data(), exact.energies.data() + exact.energies.size());
    d.exact_residuals.assign(exact.residuals.data(), exact.residuals.data() + exact.residuals.size());
    d.exact_method = exact.method;
    d.projector_rank = std::clamp<std::size_t>(s.projector_rank, 1, s.n_surfaces);
    for (std::size_t rank = 1; rank <= d.projector_rank; ++rank) {
        const Projector p(field, rank);
        const std::size_t k = std::min(k_exact, p.subspace_dim());
        const EffectiveSolution eff = solve_effective(p, h, k);
        d.heff_drift.push_back({rank, eff.energies[0]});
        if (rank == d.projector_rank) {
            d.heff_energies.assign(eff.energies.data(), eff.energies.data() + eff.energies.size());
            for (std::size_t j = 0; j < d.heff_energies.size() && j < d.exact_energies.size(); ++j) {
                d.heff_gap_to_exact.push_back(d.heff_energies[j] - d.exact_energies[j]);
            }
        }
    }

    for (std::size_t a = 0; a < s.n_surfaces; ++a) d.t1_labels.push_back({a, 0});
    const T1Coupling coupling = t1_coupling_matrix(field, nuclear, d.t1_labels);
    d.t1_matrix = coupling.matrix;
    d.t1_max_off_diagonal = coupling.max_off_diagonal;
    d.t1_asymmetry = coupling.asymmetry;
    d.min_adjacent_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a + 1 < field.lambdas.rows(); ++a) {
        d.min_adjacent_gap =
            std::min(d.min_adjacent_gap, (field.lambdas.row(a + 1) - field.lambdas.row(a)).minCoeff());
    }
    d.t1_coupling_to_gap = d.t1_max_off_diagonal / d.min_adjacent_gap;
    for (std::size_t a = 0; a < s.n_surfaces; ++a) {
        const AdiabaticResidual r = adiabatic_residual(field, a);
        d.adiabatic_residual_max.push_back(r.max);
        d.adiabatic_residual_mean.push_back(r.mean);
    }
    return row;
}

ComparisonReport empty_report(const PipelineSettings& s) {
    validate(s.model);
    ComparisonReport report;
    report.family = family_name(s.model.potential);
    report.model = s.model;
    report.seed = s.exact.krylov.seed;
    return report;
}

}  // namespace

ComparisonReport kappa_scaling_study(const PipelineSettings& settings, const std::vector<double>& mass_ratios) {
    if (mass_ratios.empty()) throw std::invalid_argument("kappa_scaling_study: no mass ratios");
    for (std::size_t i = 0; i < mass_ratios.size(); ++i) {
        if (!(std::isfinite(mass_ratios[i]) && mass_ratios[i] > 0.0)) {
            throw std::invalid_argument(fmt::format("kappa_scaling_study: mass ratio {} is not positive", mass_ratios[i]));
        }
        if (i > 0 && !(mass_ratios[i] > mass_ratios[i - 1])) {
            throw std::invalid_argument("kappa_scaling_study: mass ratios must be strictly ascending");
        }
    }
    ComparisonReport report = empty_report(settings);
    report.rows.resize(mass_ratios.size());
    parallel_for(mass_ratios.size(), settings.threads, [&](std::size_t i) {
        const ModelSpec spec = with_mass_ratio(settings.model, mass_ratios[i]);
        try {
            report.rows[i] = compute_row(settings, spec, 1, nullptr);
        } catch (const SolverError& e) {
            throw SolverError(fmt::format("mass ratio {}: {}", mass_ratios[i], e.what()), e.residuals());
        }
    });
    report.error_kappa_slope = error_kappa_slope(report.rows);
    return report;
}

ComparisonReport compare_report(const PipelineSettings& settings) {
    ComparisonReport report = empty_report(settings);
    CompareDetails details;
    report.rows.push_back(compute_row(settings, settings.model, settings.threads, &details));
    report.details = std::move(details);
    return report;
}

}  // namespace bolab
