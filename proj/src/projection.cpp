#include "bolab/projection.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "bolab/linalg.hpp"

namespace bolab {

Projector::Projector(const ElectronicField& field, std::size_t rank)
    : grid1_(field.grid1), grid2_(field.grid2), rank_(rank) {
    if (rank == 0) throw std::invalid_argument("build_projector: rank N must be positive");
    if (rank > field.n_surfaces) {
        throw std::invalid_argument(
            fmt::format("build_projector: rank {} exceeds the {} scanned surfaces", rank, field.n_surfaces));
    }
    psi_.assign(field.psi.begin(), field.psi.begin() + static_cast<std::ptrdiff_t>(rank));
}

Eigen::VectorXd Projector::coordinates(const Eigen::VectorXd& f) const {
    const auto n1 = static_cast<Eigen::Index>(grid1_.n);
    const auto n2 = static_cast<Eigen::Index>(grid2_.n);
    const auto N = static_cast<Eigen::Index>(rank_);
    if (f.size() != n1 * n2) throw std::invalid_argument("Projector: vector size does not match the product grid");
    const double scale = grid2_.h * std::sqrt(grid1_.h);
    Eigen::VectorXd coords(n1 * N);
    for (Eigen::Index i = 0; i < n1; ++i) {
        const auto slice = f.segment(i * n2, n2);
        for (Eigen::Index a = 0; a < N; ++a) {
            coords[i * N + a] = scale * psi_[static_cast<std::size_t>(a)].row(i).dot(slice);
        }
    }
    return coords;
}

Eigen::VectorXd Projector::synthesize(const Eigen::VectorXd& coords) const {
    const auto n1 = static_cast<Eigen::Index>(grid1_.n);
    const auto n2 = static_cast<Eigen::Index>(grid2_.n);
    const auto N = static_cast<Eigen::Index>(rank_);
    if (coords.size() != n1 * N) throw std::invalid_argument("Projector: coordinate count mismatch");
    const double scale = 1.0 / std::sqrt(grid1_.h);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n1 * n2);
    for (Eigen::Index i = 0; i < n1; ++i) {
        auto slice = out.segment(i * n2, n2);
        for (Eigen::Index a = 0; a < N; ++a) {
            slice += (scale * coords[i * N + a]) * psi_[static_cast<std::size_t>(a)].row(i).transpose();
        }
    }
    return out;
}

Eigen::VectorXd Projector::apply(const Eigen::VectorXd& f) const { return synthesize(coordinates(f)); }

Projector build_projector(const ElectronicField& field, std::size_t rank) { return Projector(field, rank); }

Eigen::VectorXd apply_effective(const Projector& p, const FullHamiltonian& h, const Eigen::VectorXd& f) {
    return p.apply(h.apply(p.apply(f)));
}

EffectiveSolution solve_effective(const Projector& p, const FullHamiltonian& h, std::size_t k) {
    if (!(p.grid1() == h.grid1()) || !(p.grid2() == h.grid2())) {
        throw std::invalid_argument("solve_effective: projector and Hamiltonian use different grids");
    }
    const std::size_t dim = p.subspace_dim();
    if (k == 0 || k > dim) {
        throw std::invalid_argument(fmt::format("solve_effective: k must lie in [1, {}], got {}", dim, k));
    }
    const auto n1 = static_cast<Eigen::Index>(p.grid1().n);
    const auto n2 = static_cast<Eigen::Index>(p.grid2().n);
    const auto N = static_cast<Eigen::Index>(p.rank());
    const double h2 = p.grid2().h;
    const double x1_coupling = -0.5 / (h.spec().M * p.grid1().h * p.grid1().h);

    // Block-tridiagonal matrix of H in the basis e_i (x) psi_a(x1_i; .) / sqrt(h1):
    // on-slice blocks are the clamped operator, neighbouring slices couple
    // through T1 times the overlap of their retained states.
    Eigen::MatrixXd hs = Eigen::MatrixXd::Zero(n1 * N, n1 * N);
    for (Eigen::Index i = 0; i < n1; ++i) {
        const SymTridiagonal clamped = clamped_operator(h.spec(), p.grid2(), p.grid1().point(static_cast<std::size_t>(i)));
        for (Eigen::Index a = 0; a < N; ++a) {
            const Eigen::VectorXd image = clamped.apply(p.retained(static_cast<std::size_t>(a)).row(i).transpose());
            for (Eigen::Index b = 0; b < N; ++b) {
                const auto psi_b = p.retained(static_cast<std::size_t>(b)).row(i);
                const double overlap = h2 * psi_b.dot(p.retained(static_cast<std::size_t>(a)).row(i));
                hs(i * N + b, i * N + a) = h2 * psi_b.dot(image.transpose()) - 2.0 * x1_coupling * overlap;
            }
        }
        if (i + 1 < n1) {
            for (Eigen::Index a = 0; a < N; ++a) {
                for (Eigen::Index b = 0; b < N; ++b) {
                    const double overlap = h2 * p.retained(static_cast<std::size_t>(b)).row(i + 1).dot(
                                                    p.retained(static_cast<std::size_t>(a)).row(i));
                    hs((i + 1) * N + b, i * N + a) = x1_coupling * overlap;
                    hs(i * N + a, (i + 1) * N + b) = x1_coupling * overlap;
                }
            }
        }
    }
    hs = 0.5 * (hs + hs.transpose()).eval();

    const EigenPairs pairs = lowest_eigenpairs_dense(hs, k);
    EffectiveSolution out;
    out.rank = p.rank();
    out.subspace_dim = dim;
    out.energies = pairs.values;
    out.subspace_matrix = std::move(hs);
    out.states.resize(n1 * n2, static_cast<Eigen::Index>(k));
    out.residuals.resize(static_cast<Eigen::Index>(k));
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
        Eigen::VectorXd v = p.synthesize(pairs.vectors.col(c));
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        const double nrm = std::sqrt(h.weight()) * v.norm();
        v /= nrm;
        const Eigen::VectorXd r = apply_effective(p, h, v) - out.energies[c] * v;
        out.residuals[c] = std::sqrt(h.weight()) * r.norm();
        out.states.col(c) = v;
    }
    return out;
}

}  // namespace bolab
