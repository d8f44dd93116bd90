#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "bolab/clamped.hpp"
#include "bolab/exact.hpp"
#include "bolab/grid.hpp"
#include "bolab/model.hpp"

namespace bolab {

struct NuclearLevel {
    double energy = 0.0;
    RealGridFunction theta;
};

/// Eigenpairs of -1/(2M) d^2/dx1^2 + lambda_a(x1) (plus, optionally, the
/// diagonal Born-Huang correction).
struct NuclearSolution {
    std::size_t surface_index = 0;
    double nuclear_mass = 1.0;
    std::vector<NuclearLevel> levels;
    Eigen::VectorXd born_huang;  // per-slice diagonal correction, always reported
    bool born_huang_included = false;
};

struct NuclearOptions {
    bool include_born_huang = false;
};

NuclearSolution solve_nuclear(const ElectronicField& field, const ModelSpec& spec, std::size_t a,
                              std::size_t n_levels, const NuclearOptions& options = {});

/// Per-slice diagonal Born-Huang term (1/2M) ||d psi_a / d x1||^2.
Eigen::VectorXd born_huang_correction(const ElectronicField& field, std::size_t a, double nuclear_mass);

/// theta(x1) psi_a(x1; x2) on the product grid.
struct ProductState {
    Grid1D grid1;
    Grid1D grid2;
    RowMatrix amplitudes;  // n1 x n2
    std::size_t surface = 0;
    std::size_t level = 0;

    /// Row-major flattening, the FullHamiltonian layout.
    Eigen::VectorXd flat() const;
    double norm() const;
};

ProductState assemble_product_state(const NuclearSolution& sol, const ElectronicField& field, std::size_t n);

/// <Psi|H|Psi> with H the full two-body operator.
double rayleigh_quotient(const FullHamiltonian& h, const ProductState& state);

struct AdiabaticResidual {
    Eigen::VectorXd x1;     // interior slice positions
    Eigen::VectorXd norms;  // ||(psi(x1+h) - psi(x1-h)) / 2h|| per slice
    double max = 0.0;
    double mean = 0.0;      // h1-weighted mean over the interior slices
};

AdiabaticResidual adiabatic_residual(const ElectronicField& field, std::size_t a);

struct LevelRef {
    std::size_t surface = 0;
    std::size_t level = 0;
};

/// <theta_b psi_b | T1 | theta_a psi_a> split into the three product-rule
/// terms. The discrete cross term uses the average of forward and backward
/// difference products, which makes the three terms sum exactly to the
/// three-point stencil of the product, so the matrix is symmetric.
struct T1Coupling {
    std::vector<LevelRef> labels;
    Eigen::MatrixXd matrix;        // sum of the three terms
    Eigen::MatrixXd theta_term;    // theta'' psi
    Eigen::MatrixXd cross_term;    // 2 theta' psi'
    Eigen::MatrixXd psi_term;      // theta psi''
    double max_off_diagonal = 0.0;
    double asymmetry = 0.0;        // max |M - M^T|
};

T1Coupling t1_coupling_matrix(const ElectronicField& field, const std::map<std::size_t, NuclearSolution>& nuclear,
                              const std::vector<LevelRef>& levels);

}  // namespace bolab
