#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bolab/clamped.hpp"
#include "bolab/exact.hpp"

namespace bolab {

/// Slice-wise projector onto span{psi_a(x1_i; .) : a < N}, acting on
/// product-grid amplitudes. Holds its own copy of the retained states.
class Projector {
public:
    Projector(const ElectronicField& field, std::size_t rank);

    std::size_t rank() const { return rank_; }
    const Grid1D& grid1() const { return grid1_; }
    const Grid1D& grid2() const { return grid2_; }
    std::size_t subspace_dim() const { return rank_ * grid1_.n; }

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

    /// Coordinates of f in the orthonormal subspace basis e_i (x) psi_a(x1_i; .) / sqrt(h1),
    /// ordered i * N + a.
    Eigen::VectorXd coordinates(const Eigen::VectorXd& f) const;
    Eigen::VectorXd synthesize(const Eigen::VectorXd& coords) const;

    const RowMatrix& retained(std::size_t a) const { return psi_[a]; }

private:
    Grid1D grid1_;
    Grid1D grid2_;
    std::size_t rank_;
    std::vector<RowMatrix> psi_;
};

Projector build_projector(const ElectronicField& field, std::size_t rank);

/// P H P applied to a product-grid vector.
Eigen::VectorXd apply_effective(const Projector& p, const FullHamiltonian& h, const Eigen::VectorXd& f);

struct EffectiveSolution {
    std::size_t rank = 0;
    std::size_t subspace_dim = 0;  // size of the non-zero sector, N * n1
    Eigen::VectorXd energies;      // lowest k of the non-zero sector, ascending
    Eigen::MatrixXd states;        // product-grid amplitudes, normalized
    Eigen::VectorXd residuals;     // ||P H P v - E v||
    Eigen::MatrixXd subspace_matrix;
};

/// Lowest k eigenpairs of P H P restricted to the range of P. The zero
/// eigenvalues on the orthogonal complement are not returned.
EffectiveSolution solve_effective(const Projector& p, const FullHamiltonian& h, std::size_t k);

}  // namespace bolab
