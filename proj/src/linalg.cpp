#include "bolab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>
#include <lapacke.h>

#include "bolab/errors.hpp"

namespace bolab {
namespace {

using Rng = std::mt19937_64;

void fill_uniform(Eigen::Ref<Eigen::VectorXd> v, Rng& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
}

// Orthonormalizes the columns of z against `basis` and against each other.
// Columns that collapse (invariant subspace reached) are replaced by fresh
// random directions.
void orthonormalize_block(const Eigen::Ref<const Eigen::MatrixXd>& basis, Eigen::MatrixXd& z,
                          Rng& rng) {
    const Eigen::VectorXd original_norms = z.colwise().norm().transpose();
    const bool has_basis = basis.cols() > 0;
    for (int pass = 0; pass < 2 && has_basis; ++pass) {
        const Eigen::MatrixXd coeff = basis.transpose() * z;
        z.noalias() -= basis * coeff;
    }
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto project = [&](Eigen::Ref<Eigen::VectorXd> v) {
            if (has_basis) {
                const Eigen::VectorXd coeff = basis.transpose() * v;
                v.noalias() -= basis * coeff;
            }
            for (Eigen::Index p = 0; p < c; ++p) v -= z.col(p).dot(v) * z.col(p);
        };
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index p = 0; p < c; ++p) z.col(c) -= z.col(p).dot(z.col(c)) * z.col(p);
        }
        double nrm = z.col(c).norm();
        const double reference = original_norms[c] > 0.0 ? original_norms[c] : 1.0;
        int attempts = 0;
        while (!(nrm > 1e-8 * reference)) {
            if (++attempts > 8) throw SolverError("krylov: unable to extend basis (dimension exhausted)");
            fill_uniform(z.col(c), rng);
            project(z.col(c));
            project(z.col(c));
            nrm = z.col(c).norm();
            if (nrm > 0.0) {
                z.col(c) /= nrm;
                project(z.col(c));
                nrm = z.col(c).norm();
            }
        }
        z.col(c) /= nrm;
        project(z.col(c));
        z.col(c).normalize();
    }
}

bool converged(double residual, double value, const KrylovOptions& opt) {
    return residual <= std::max(opt.rel_tol * std::abs(value), opt.abs_tol);
}

}  // namespace

Eigen::MatrixXd seeded_uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < m.cols(); ++c) fill_uniform(m.col(c), rng);
    return m;
}

EigenPairs lowest_eigenpairs_tridiagonal(const SymTridiagonal& t, std::size_t k) {
    const auto n = static_cast<lapack_int>(t.size());
    if (k == 0 || k > t.size()) {
        throw std::invalid_argument(fmt::format("tridiagonal eigensolve: k={} outside [1, {}]", k, t.size()));
    }
    std::vector<double> d(t.diag.data(), t.diag.data() + n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::copy(t.off.data(), t.off.data() + t.off.size(), e.begin());
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(k));
    std::vector<lapack_int> support(2 * k);
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1,
                       static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != static_cast<lapack_int>(k)) {
        throw SolverError(fmt::format("dstevr failed (info={}, found={} of {})", info, found, k));
    }
    EigenPairs out;
    out.values = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(k));
    out.vectors = std::move(z);
    out.residuals.resize(static_cast<Eigen::Index>(k));
    for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
        out.residuals[c] = (t.apply(out.vectors.col(c)) - out.values[c] * out.vectors.col(c)).norm();
    }
    out.method = "tridiagonal-mrrr";
    return out;
}

EigenPairs lowest_eigenpairs_dense(const Eigen::MatrixXd& a, std::size_t k) {
    if (a.rows() != a.cols()) throw std::invalid_argument("dense eigensolve: matrix must be square");
    if (k == 0 || k > static_cast<std::size_t>(a.rows())) {
        throw std::invalid_argument(fmt::format("dense eigensolve: k={} outside [1, {}]", k, a.rows()));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolve did not converge");
    const auto kk = static_cast<Eigen::Index>(k);
    EigenPairs out;
    out.values = es.eigenvalues().head(kk);
    out.vectors = es.eigenvectors().leftCols(kk);
    out.residuals = (a * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
    out.method = "dense";
    return out;
}

EigenPairs lowest_eigenpairs_krylov(const BlockOperator& op, std::size_t dim, std::size_t k,
                                    const KrylovOptions& options) {
    const auto b = static_cast<Eigen::Index>(std::max<std::size_t>(1, options.block_size));
    const auto kk = static_cast<Eigen::Index>(k);
    const auto n = static_cast<Eigen::Index>(dim);
    if (kk == 0) throw std::invalid_argument("krylov: k must be positive");

    Eigen::Index m = options.max_basis > 0 ? static_cast<Eigen::Index>(options.max_basis)
                                           : std::max<Eigen::Index>(3 * kk + 2 * b, 64);
    m = ((m + b - 1) / b) * b;
    if (m + b > n) {
        throw std::invalid_argument(
            fmt::format("krylov: basis size {} too large for dimension {}; use the dense solver", m, n));
    }
    // Ritz vectors retained across a restart
    const Eigen::Index keep = std::min(m - b, std::max(kk + b, m / 2));
    if (keep < kk) throw std::invalid_argument("krylov: basis too small for requested eigenpairs");

    Rng rng(options.seed);
    Eigen::MatrixXd basis(n, m);
    Eigen::MatrixXd image(n, m);  // A * basis
    Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(m, m);

    Eigen::MatrixXd block(n, b);
    for (Eigen::Index c = 0; c < b; ++c) fill_uniform(block.col(c), rng);
    orthonormalize_block(basis.leftCols(0), block, rng);

    Eigen::Index j = 0;
    Eigen::VectorXd ritz_values;
    Eigen::VectorXd ritz_residuals = Eigen::VectorXd::Constant(kk, std::numeric_limits<double>::infinity());
    Eigen::MatrixXd block_image(n, b);
    std::size_t matvecs = 0;

    for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
        while (j + b <= m) {
            basis.middleCols(j, b) = block;
            op(block, block_image);
            matvecs += static_cast<std::size_t>(b);
            image.middleCols(j, b) = block_image;
            const Eigen::MatrixXd coeff = basis.leftCols(j + b).transpose() * block_image;
            projected.block(0, j, j + b, b) = coeff;
            projected.block(j, 0, b, j + b) = coeff.transpose();
            j += b;
            Eigen::MatrixXd next = block_image - basis.leftCols(j) * coeff;
            orthonormalize_block(basis.leftCols(j), next, rng);
            block = std::move(next);
        }

        const Eigen::MatrixXd h = 0.5 * (projected.topLeftCorner(j, j) +
                                         projected.topLeftCorner(j, j).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw SolverError("krylov: projected eigensolve failed");
        const Eigen::MatrixXd s = es.eigenvectors();
        ritz_values = es.eigenvalues().head(kk);

        const Eigen::MatrixXd x = basis.leftCols(j) * s.leftCols(kk);
        const Eigen::MatrixXd ax = image.leftCols(j) * s.leftCols(kk);
        ritz_residuals = (ax - x * ritz_values.asDiagonal()).colwise().norm().transpose();

        bool all = true;
        for (Eigen::Index c = 0; c < kk; ++c) all = all && converged(ritz_residuals[c], ritz_values[c], options);
        if (all) {
            // Residuals from a fresh application, not the recurrence.
            Eigen::MatrixXd fresh(n, kk);
            op(x, fresh);
            EigenPairs out;
            out.values = ritz_values;
            out.vectors = x;
            out.residuals = (fresh - x * ritz_values.asDiagonal()).colwise().norm().transpose();
            out.iterations = matvecs;
            out.method = "krylov-schur";
            bool fresh_ok = true;
            for (Eigen::Index c = 0; c < kk; ++c) {
                fresh_ok = fresh_ok && converged(out.residuals[c], out.values[c], options);
            }
            if (fresh_ok) return out;
        }

        const Eigen::MatrixXd kept_basis = basis.leftCols(j) * s.leftCols(keep);
        const Eigen::MatrixXd kept_image = image.leftCols(j) * s.leftCols(keep);
        basis.leftCols(keep) = kept_basis;
        image.leftCols(keep) = kept_image;
        projected.setZero();
        projected.topLeftCorner(keep, keep) = es.eigenvalues().head(keep).asDiagonal();
        j = keep;
    }

    std::vector<double> res(ritz_residuals.data(), ritz_residuals.data() + ritz_residuals.size());
    throw SolverError(fmt::format("krylov: no convergence after {} restarts ({} operator applications)",
                                  options.max_restarts, matvecs),
                      std::move(res));
}

}  // namespace bolab
