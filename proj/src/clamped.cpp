#include "bolab/clamped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/core.h>

#include "bolab/errors.hpp"
#include "bolab/linalg.hpp"
#include "bolab/parallel.hpp"

namespace bolab {
namespace {

// Largest-magnitude entry made positive (first index wins ties).
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
}

void fix_sign_row(RowMatrix& psi, Eigen::Index row) {
    Eigen::Index arg = 0;
    psi.row(row).cwiseAbs().maxCoeff(&arg);
    if (psi(row, arg) < 0.0) psi.row(row) *= -1.0;
}

}  // namespace

RealGridFunction ElectronicField::slice_state(std::size_t a, std::size_t i) const {
    if (a >= n_surfaces || i >= grid1.n) throw std::out_of_range("slice_state: index out of range");
    return RealGridFunction(grid2, psi[a].row(static_cast<Eigen::Index>(i)).transpose());
}

SymTridiagonal clamped_operator(const ModelSpec& spec, const Grid1D& grid2, double X) {
    SymTridiagonal t = second_derivative_matrix(grid2);
    const double c = -0.5 / spec.m;
    t.diag *= c;
    t.off *= c;
    for (std::size_t j = 0; j < grid2.n; ++j) {
        t.diag[static_cast<Eigen::Index>(j)] += evaluate_potential(spec, X, grid2.point(j));
    }
    return t;
}

SliceSolution solve_clamped_slice(const ModelSpec& spec, const Grid1D& grid2, double X, std::size_t n_states) {
    validate(spec);
    if (n_states == 0 || n_states > grid2.n) {
        throw std::invalid_argument(
            fmt::format("solve_clamped_slice: need 1 <= A <= n2 = {}, got {}", grid2.n, n_states));
    }
    EigenPairs pairs;
    try {
        pairs = lowest_eigenpairs_tridiagonal(clamped_operator(spec, grid2, X), n_states);
    } catch (const SolverError& e) {
        throw SolverError(fmt::format("clamped slice at x1 = {}: {}", X, e.what()), e.residuals());
    }
    SliceSolution out;
    out.energies = std::move(pairs.values);
    out.states = std::move(pairs.vectors) / std::sqrt(grid2.h);
    for (Eigen::Index c = 0; c < out.states.cols(); ++c) fix_sign(out.states.col(c));
    return out;
}

ElectronicField scan_pes(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2, std::size_t n_surfaces,
                         const ScanOptions& options) {
    validate(spec);
    if (n_surfaces == 0 || n_surfaces > grid2.n) {
        throw std::invalid_argument(fmt::format("scan_pes: need 1 <= A <= n2 = {}, got {}", grid2.n, n_surfaces));
    }
    const auto n1 = static_cast<Eigen::Index>(grid1.n);
    const auto n2 = static_cast<Eigen::Index>(grid2.n);
    const auto A = static_cast<Eigen::Index>(n_surfaces);

    ElectronicField field;
    field.grid1 = grid1;
    field.grid2 = grid2;
    field.n_surfaces = n_surfaces;
    field.lambdas.resize(A, n1);
    field.psi.assign(n_surfaces, RowMatrix(n1, n2));

    parallel_for(grid1.n, options.threads, [&](std::size_t i) {
        const SliceSolution s = solve_clamped_slice(spec, grid2, grid1.point(i), n_surfaces);
        const auto row = static_cast<Eigen::Index>(i);
        field.lambdas.col(row) = s.energies;
        for (Eigen::Index a = 0; a < A; ++a) field.psi[static_cast<std::size_t>(a)].row(row) = s.states.col(a).transpose();
    });

    fix_phases(field, options);
    return field;
}

void fix_phases(ElectronicField& field, const ScanOptions& options) {
    const auto n1 = static_cast<Eigen::Index>(field.grid1.n);
    const auto A = static_cast<Eigen::Index>(field.n_surfaces);
    const double h2 = field.grid2.h;
    field.flags.clear();

    for (Eigen::Index i = 0; i < n1; ++i) {
        // Near-degenerate clusters [start, end) of this slice.
        std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
        for (Eigen::Index a = 0; a < A;) {
            Eigen::Index end = a + 1;
            while (end < A) {
                const double gap = field.lambdas(end, i) - field.lambdas(end - 1, i);
                const double scale = std::max(1.0, std::abs(field.lambdas(end, i)));
                if (gap >= options.degeneracy_tol * scale) break;
                field.flags.push_back({SliceFlag::Kind::Degenerate, static_cast<std::size_t>(i),
                                       static_cast<std::size_t>(end - 1), gap});
                ++end;
            }
            clusters.emplace_back(a, end);
            a = end;
        }

        if (i == 0) {
            for (Eigen::Index a = 0; a < A; ++a) fix_sign_row(field.psi[static_cast<std::size_t>(a)], 0);
            continue;
        }

        for (const auto& [start, end] : clusters) {
            const Eigen::Index size = end - start;
            if (size == 1) {
                auto& psi = field.psi[static_cast<std::size_t>(start)];
                const double overlap = h2 * psi.row(i - 1).dot(psi.row(i));
                if (overlap < 0.0) psi.row(i) *= -1.0;
                continue;
            }
            // Rotate the cluster onto the previous slice (orthogonal Procrustes).
            Eigen::MatrixXd overlap(size, size);
            for (Eigen::Index p = 0; p < size; ++p) {
                for (Eigen::Index q = 0; q < size; ++q) {
                    overlap(p, q) = h2 * field.psi[static_cast<std::size_t>(start + p)].row(i - 1).dot(
                                             field.psi[static_cast<std::size_t>(start + q)].row(i));
                }
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::MatrixXd rotation = svd.matrixV() * svd.matrixU().transpose();
            if ((rotation - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff() < 1e-12) continue;
            Eigen::MatrixXd rows(size, field.grid2.n);
            for (Eigen::Index p = 0; p < size; ++p) rows.row(p) = field.psi[static_cast<std::size_t>(start + p)].row(i);
            const Eigen::MatrixXd rotated = rotation.transpose() * rows;
            for (Eigen::Index p = 0; p < size; ++p) field.psi[static_cast<std::size_t>(start + p)].row(i) = rotated.row(p);
        }

        for (Eigen::Index a = 0; a < A; ++a) {
            const auto& psi = field.psi[static_cast<std::size_t>(a)];
            const double overlap = h2 * psi.row(i - 1).dot(psi.row(i));
            if (std::abs(overlap) < options.crossing_overlap) {
                field.flags.push_back({SliceFlag::Kind::Crossing, static_cast<std::size_t>(i),
                                       static_cast<std::size_t>(a), std::abs(overlap)});
            }
        }
    }
}

HeavyReport heavy_gap_report(const ElectronicField& field, Interval region, double t1_scale,
                             double ratio_threshold) {
    if (field.n_surfaces < 2) throw std::invalid_argument("heavy_gap_report: need at least two surfaces");
    if (!(std::isfinite(t1_scale) && t1_scale > 0.0)) {
        throw std::invalid_argument("heavy_gap_report: t1_scale must be positive");
    }
    if (!(region.lo < region.hi)) throw std::invalid_argument("heavy_gap_report: empty region");
    if (region.lo < field.grid1.x_min || region.hi > field.grid1.x_max) {
        throw std::invalid_argument(fmt::format("heavy_gap_report: region [{}, {}] leaves the nuclear grid [{}, {}]",
                                                region.lo, region.hi, field.grid1.x_min, field.grid1.x_max));
    }
    std::vector<Eigen::Index> inside;
    for (std::size_t i = 0; i < field.grid1.n; ++i) {
        const double x = field.grid1.point(i);
        if (x >= region.lo && x <= region.hi) inside.push_back(static_cast<Eigen::Index>(i));
    }
    if (inside.empty()) throw std::invalid_argument("heavy_gap_report: no grid slices inside region");

    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a + 1 < static_cast<Eigen::Index>(field.n_surfaces); ++a) {
        for (Eigen::Index i : inside) {
            for (Eigen::Index ip : inside) {
                min_gap = std::min(min_gap, std::abs(field.lambdas(a + 1, i) - field.lambdas(a, ip)));
            }
        }
    }

    HeavyReport out;
    out.region = region;
    out.t1_scale = t1_scale;
    out.min_gap = min_gap;
    out.ratio = min_gap / t1_scale;
    out.threshold = ratio_threshold;
    out.heavy_ok = out.ratio >= ratio_threshold;
    out.slices_in_region = inside.size();
    return out;
}

}  // namespace bolab
