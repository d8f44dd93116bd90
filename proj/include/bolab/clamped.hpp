#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bolab/grid.hpp"
#include "bolab/model.hpp"

namespace bolab {

/// Lowest eigenpairs of one clamped Hamiltonian -1/(2m) d^2/dx2^2 + W(X, x2).
struct SliceSolution {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd states;    // n2 x A, columns normalized under the grid2 inner product
};

SliceSolution solve_clamped_slice(const ModelSpec& spec, const Grid1D& grid2, double X, std::size_t n_states);

/// The clamped operator of slice X as a tridiagonal matrix on grid2.
SymTridiagonal clamped_operator(const ModelSpec& spec, const Grid1D& grid2, double X);

struct SliceFlag {
    enum class Kind { Crossing, Degenerate };
    Kind kind;
    std::size_t slice;
    std::size_t surface;
    double value;  // overlap magnitude (Crossing) or level spacing (Degenerate)
};

/// Surfaces lambda_a(x1) and the phase-continuous family psi_a(x1; x2).
struct ElectronicField {
    Grid1D grid1;
    Grid1D grid2;
    std::size_t n_surfaces = 0;
    Eigen::MatrixXd lambdas;       // A x n1
    std::vector<RowMatrix> psi;    // per surface, n1 x n2; row i is the slice at x1_i
    std::vector<SliceFlag> flags;

    RealGridFunction slice_state(std::size_t a, std::size_t i) const;
};

struct ScanOptions {
    std::size_t threads = 1;
    double crossing_overlap = 0.5;
    double degeneracy_tol = 1e-10;  // relative to max(1, |lambda|)
};

ElectronicField scan_pes(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2, std::size_t n_surfaces,
                         const ScanOptions& options = {});

/// Sign (or, inside degenerate clusters, rotation) sweep in ascending x1 so that
/// consecutive slices overlap with non-negative real part. Also refreshes the
/// crossing flags. Idempotent.
void fix_phases(ElectronicField& field, const ScanOptions& options = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct HeavyReport {
    Interval region;
    double t1_scale = 0.0;
    double min_gap = 0.0;
    double ratio = 0.0;
    double threshold = 10.0;
    bool heavy_ok = false;
    std::size_t slices_in_region = 0;
};

/// Smallest gap |lambda_{a+1}(x1) - lambda_a(x1')| over adjacent surfaces and
/// all slice pairs x1, x1' inside `region`, compared against `t1_scale`.
HeavyReport heavy_gap_report(const ElectronicField& field, Interval region, double t1_scale,
                             double ratio_threshold = 10.0);

}  // namespace bolab
