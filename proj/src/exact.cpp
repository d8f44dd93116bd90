#include "bolab/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "bolab/errors.hpp"

namespace bolab {

FullHamiltonian::FullHamiltonian(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2)
    : spec_(spec), grid1_(grid1), grid2_(grid2) {
    validate(spec);
    if (grid1.n == 0 || grid2.n == 0) throw std::invalid_argument("FullHamiltonian: empty grid");
    if (grid2.n > kMaxProductDim / grid1.n) {
        throw std::invalid_argument(
            fmt::format("FullHamiltonian: product dimension {} x {} exceeds the {} limit", grid1.n, grid2.n,
                        kMaxProductDim));
    }
    c1_ = -0.5 / (spec.M * grid1.h * grid1.h);
    c2_ = -0.5 / (spec.m * grid2.h * grid2.h);
    potential_.resize(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < grid1.n; ++i) {
        const double x1 = grid1.point(i);
        for (std::size_t j = 0; j < grid2.n; ++j) {
            potential_[static_cast<Eigen::Index>(i * grid2.n + j)] = evaluate_potential(spec, x1, grid2.point(j));
        }
    }
}

void FullHamiltonian::apply(const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Ref<Eigen::VectorXd> out) const {
    const auto n1 = static_cast<Eigen::Index>(grid1_.n);
    const auto n2 = static_cast<Eigen::Index>(grid2_.n);
    const double diag = -2.0 * (c1_ + c2_);
    for (Eigen::Index i = 0; i < n1; ++i) {
        const Eigen::Index row = i * n2;
        for (Eigen::Index j = 0; j < n2; ++j) {
            const Eigen::Index p = row + j;
            double acc = (diag + potential_[p]) * in[p];
            if (j > 0) acc += c2_ * in[p - 1];
            if (j + 1 < n2) acc += c2_ * in[p + 1];
            if (i > 0) acc += c1_ * in[p - n2];
            if (i + 1 < n1) acc += c1_ * in[p + n2];
            out[p] = acc;
        }
    }
}

Eigen::VectorXd FullHamiltonian::apply(const Eigen::VectorXd& in) const {
    if (static_cast<std::size_t>(in.size()) != dim()) throw std::invalid_argument("FullHamiltonian: size mismatch");
    Eigen::VectorXd out(in.size());
    apply(in, out);
    return out;
}

Eigen::VectorXd FullHamiltonian::apply_t1(const Eigen::VectorXd& in) const {
    const auto n1 = static_cast<Eigen::Index>(grid1_.n);
    const auto n2 = static_cast<Eigen::Index>(grid2_.n);
    Eigen::VectorXd out(in.size());
    for (Eigen::Index p = 0; p < in.size(); ++p) {
        const Eigen::Index i = p / n2;
        double acc = -2.0 * c1_ * in[p];
        if (i > 0) acc += c1_ * in[p - n2];
        if (i + 1 < n1) acc += c1_ * in[p + n2];
        out[p] = acc;
    }
    return out;
}

double FullHamiltonian::expectation(const Eigen::VectorXd& f) const {
    return f.dot(apply(f)) / f.squaredNorm();
}

Eigen::MatrixXd FullHamiltonian::to_dense() const {
    if (dim() > kMaxDenseDim) {
        throw std::invalid_argument(fmt::format("FullHamiltonian: refusing to densify dimension {}", dim()));
    }
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd dense(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        e[c] = 1.0;
        apply(e, dense.col(c));
        e[c] = 0.0;
    }
    return dense;
}

double FullHamiltonian::spectral_bound() const {
    return potential_.cwiseAbs().maxCoeff() + 4.0 * (std::abs(c1_) + std::abs(c2_));
}

FullHamiltonian assemble_full_hamiltonian(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2) {
    return FullHamiltonian(spec, grid1, grid2);
}

ExactSolution solve_exact(const FullHamiltonian& h, std::size_t k, const ExactOptions& options) {
    if (k == 0 || k > kMaxExactLevels) {
        throw std::invalid_argument(fmt::format("solve_exact: k must lie in [1, {}], got {}", kMaxExactLevels, k));
    }
    if (k > h.dim()) throw std::invalid_argument("solve_exact: k exceeds the problem dimension");

    EigenPairs pairs;
    if (h.dim() < options.dense_below) {
        pairs = lowest_eigenpairs_dense(h.to_dense(), k);
    } else {
        const BlockOperator op = [&h](const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) {
            for (Eigen::Index c = 0; c < in.cols(); ++c) h.apply(in.col(c), out.col(c));
        };
        pairs = lowest_eigenpairs_krylov(op, h.dim(), k, options.krylov);
    }

    ExactSolution out;
    out.energies = pairs.values;
    out.states = pairs.vectors / std::sqrt(h.weight());
    out.residuals = pairs.residuals;
    out.grid1 = h.grid1();
    out.grid2 = h.grid2();
    out.iterations = pairs.iterations;
    out.method = pairs.method;

    // Fixed global sign for reproducible output files.
    for (Eigen::Index c = 0; c < out.states.cols(); ++c) {
        Eigen::Index arg = 0;
        out.states.col(c).cwiseAbs().maxCoeff(&arg);
        if (out.states(arg, c) < 0.0) out.states.col(c) *= -1.0;
    }

    std::vector<double> res(out.residuals.data(), out.residuals.data() + out.residuals.size());
    for (Eigen::Index c = 0; c < out.energies.size(); ++c) {
        const double target = std::max(options.krylov.rel_tol * std::abs(out.energies[c]), options.krylov.abs_tol);
        if (!(out.residuals[c] <= target)) {
            throw SolverError(fmt::format("solve_exact: eigenpair {} residual {:.3e} above target {:.3e} ({})", c,
                                          out.residuals[c], target, out.method),
                              res);
        }
    }
    return out;
}

}  // namespace bolab
