#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bolab/bo.hpp"
#include "bolab/clamped.hpp"
#include "bolab/exact.hpp"
#include "bolab/grid.hpp"
#include "bolab/model.hpp"

namespace bolab {

// ---------------------------------------------------------------------------
// Uncertainty products

inline constexpr double kUncertaintyFloor = 0.5 - 1e-9;

struct UncertaintyResult {
    double sigma_x = 0.0;
    double sigma_p = 0.0;
    double product = 0.0;
    bool bound_ok = false;  // product >= 1/2 - 1e-9
};

/// How <p> and <p^2> are evaluated from grid samples.
///  - Spectral: moments of the sine series through the samples. This is a
///    genuine square-integrable function on the box, so sigma_x sigma_p >= 1/2
///    holds up to position-quadrature error.
///  - Stencil: the three-point and central-difference operators. Consistent
///    with the Hamiltonian but biased low by O(h^2); discrete oscillator
///    eigenstates land slightly below 1/2 this way.
enum class MomentumRoute { Spectral, Stencil };

UncertaintyResult uncertainty_product(const RealGridFunction& f, MomentumRoute route = MomentumRoute::Spectral);
UncertaintyResult uncertainty_product(const ComplexGridFunction& f, MomentumRoute route = MomentumRoute::Spectral);

/// Moments of the nuclear reduced density rho(x1, x1') = int Psi(x1, x2) Psi(x1', x2) dx2.
UncertaintyResult nuclear_uncertainty(const ProductState& state, MomentumRoute route = MomentumRoute::Spectral);

/// Same for the electronic coordinate.
UncertaintyResult electronic_uncertainty(const ProductState& state, MomentumRoute route = MomentumRoute::Spectral);

// ---------------------------------------------------------------------------
// Pipeline settings shared by the sweep, the comparison report and the CLI

/// Nuclear grid: either fixed bounds, or a symmetric box of
/// +- half_width_in_widths nuclear rms widths around x1 = 0, which tracks the
/// nuclear mass during a sweep.
struct NuclearGridRule {
    std::optional<Grid1D> fixed;
    double half_width_in_widths = 0.0;
    std::size_t n = 0;
};

/// Which estimate of the nuclear kinetic scale feeds the Heavy ratio.
///  - Fixed: the configured number.
///  - Spacing: closed-form nuclear level spacing sqrt(k1/M) (harmonic families only).
///  - Expectation: <theta_00|T1|theta_00> of the computed ground level.
///  - LevelMax: largest <theta_0n|T1|theta_0n> over the computed levels.
enum class T1Choice { Fixed, Spacing, Expectation, LevelMax };

struct HeavySettings {
    std::optional<Interval> region;  // explicit [alpha, beta]
    double region_widths = 2.0;      // otherwise +- this many nuclear rms widths
    T1Choice t1_choice = T1Choice::Spacing;
    double t1_value = 0.0;           // used with T1Choice::Fixed
    double ratio_threshold = 10.0;
};

std::string t1_choice_name(T1Choice choice);

struct PipelineSettings {
    ModelSpec model;
    NuclearGridRule grid1;
    Grid1D grid2;
    std::size_t n_surfaces = 3;
    std::size_t projector_rank = 1;
    std::size_t nuclear_levels = 4;
    std::size_t exact_levels = 4;
    bool born_huang = false;
    HeavySettings heavy;
    ExactOptions exact;
    std::size_t threads = 1;
};

/// Curvature of the lowest surface at x1 = 0: closed form for the harmonic
/// families, otherwise a three-slice finite difference.
double surface_stiffness(const ModelSpec& spec, const Grid1D& grid2);

/// rms width 1 / sqrt(2 sqrt(k M)) of the harmonic nuclear ground state.
double nuclear_rms_width(const ModelSpec& spec, const Grid1D& grid2);

Grid1D resolve_nuclear_grid(const PipelineSettings& settings, const ModelSpec& spec);
Interval resolve_heavy_region(const PipelineSettings& settings, const ModelSpec& spec, const Grid1D& grid1);

/// Closed-form nuclear level spacing sqrt(k1/M); harmonic families only.
double harmonic_level_spacing(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Reports

struct UncertaintyEntry {
    std::string label;
    UncertaintyResult result;
};

struct StateEnergy {
    std::size_t surface = 0;
    std::size_t level = 0;
    double energy = 0.0;             // nuclear eigenvalue E_{a,n}
    double rayleigh_quotient = 0.0;  // <Psi|H|Psi> of the product state
};

struct ComparisonRow {
    double mass_ratio = 0.0;
    double nuclear_mass = 0.0;
    double kappa = 0.0;
    Grid1D grid1;
    Grid1D grid2;
    double bo_energy = 0.0;
    double rayleigh_quotient = 0.0;
    double exact_energy = 0.0;
    double exact_residual = 0.0;
    double relative_error = 0.0;  // |RQ - E_exact| / |E_exact|
    double min_rayleigh_margin = 0.0;  // min over product states of RQ - E_exact
    std::vector<StateEnergy> states;
    HeavyReport heavy;
    std::string t1_choice;
    double t1_expectation = 0.0;     // <theta_00|T1|theta_00>
    double t1_max_over_levels = 0.0; // max_n <theta_0n|T1|theta_0n>
    double adiabatic_residual_max = 0.0;
    double adiabatic_residual_mean = 0.0;
    double born_huang_expectation = 0.0;
    std::size_t crossing_flags = 0;
    std::size_t degeneracy_flags = 0;
    double boundary_amplitude = 0.0;  // exact ground amplitude on the box edge, relative to its maximum
    std::vector<UncertaintyEntry> uncertainty;
    std::size_t electronic_slice_states = 0;
    double electronic_slice_min_product = 0.0;
    double min_uncertainty_product = 0.0;
};

struct EffectiveSummary {
    std::size_t rank = 0;
    double lowest = 0.0;
};

struct CompareDetails {
    std::vector<double> exact_energies;
    std::vector<double> exact_residuals;
    std::string exact_method;
    std::size_t projector_rank = 0;
    std::vector<double> heff_energies;
    std::vector<double> heff_gap_to_exact;
    std::vector<EffectiveSummary> heff_drift;  // lowest eigenvalue for N = 1 .. projector_rank
    std::vector<LevelRef> t1_labels;
    Eigen::MatrixXd t1_matrix;
    double t1_max_off_diagonal = 0.0;
    double t1_asymmetry = 0.0;
    double min_adjacent_gap = 0.0;
    double t1_coupling_to_gap = 0.0;
    std::vector<double> adiabatic_residual_max;   // per surface
    std::vector<double> adiabatic_residual_mean;  // per surface
};

struct ComparisonReport {
    std::string family;
    ModelSpec model;
    std::uint64_t seed = 0;
    std::vector<ComparisonRow> rows;
    std::optional<double> error_kappa_slope;  // d log(relative_error) / d log(kappa)
    std::optional<CompareDetails> details;
};

/// scan -> nuclear -> product states -> exact, for each M/m in `mass_ratios`.
ComparisonReport kappa_scaling_study(const PipelineSettings& settings, const std::vector<double>& mass_ratios);

/// Single-ratio report with effective-Hamiltonian, T1-coupling and adiabatic summaries.
ComparisonReport compare_report(const PipelineSettings& settings);

/// Least-squares slope of log(relative_error) against log(kappa).
std::optional<double> error_kappa_slope(const std::vector<ComparisonRow>& rows);

}  // namespace bolab
