#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "bolab/grid.hpp"

namespace bolab {

/// Lowest eigenpairs of a real symmetric problem. Columns of `vectors` have
/// unit Euclidean norm; `values` ascend.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd residuals;  // ||A v - lambda v|| per pair, unit v
    std::size_t iterations = 0;
    std::string method;
};

/// Lowest `k` eigenpairs of a symmetric tridiagonal matrix (LAPACK dstevr).
EigenPairs lowest_eigenpairs_tridiagonal(const SymTridiagonal& t, std::size_t k);

/// Lowest `k` eigenpairs of a dense symmetric matrix.
EigenPairs lowest_eigenpairs_dense(const Eigen::MatrixXd& a, std::size_t k);

/// out = A * in, column by column. Must be symmetric and pure.
using BlockOperator =
    std::function<void(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out)>;

struct KrylovOptions {
    std::size_t block_size = 4;
    std::size_t max_basis = 0;  // 0 selects a size from k and block_size
    std::size_t max_restarts = 4000;
    double rel_tol = 1e-9;      // converged when r <= max(rel_tol*|lambda|, abs_tol)
    double abs_tol = 1e-12;
    std::uint64_t seed = 0x5eedULL;
};

/// Thick-restart block Krylov (Krylov-Schur) iteration for the lowest `k`
/// eigenpairs of a matrix-free symmetric operator of size `dim`. Start
/// vectors come from a seeded generator, so results are reproducible.
/// Throws SolverError with the final residuals on non-convergence.
EigenPairs lowest_eigenpairs_krylov(const BlockOperator& op, std::size_t dim, std::size_t k,
                                    const KrylovOptions& options = {});

/// Uniform draws in [-1, 1) from a 64-bit-seeded mt19937_64.
Eigen::MatrixXd seeded_uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace bolab
