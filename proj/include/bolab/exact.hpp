#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "bolab/grid.hpp"
#include "bolab/linalg.hpp"
#include "bolab/model.hpp"

namespace bolab {

inline constexpr std::size_t kMaxDenseDim = 20000;
inline constexpr std::size_t kMaxProductDim = std::size_t{1} << 26;

/// Full two-body Hamiltonian T1 + T2 + W on the product grid, applied
/// matrix-free. Amplitudes are stored row-major: index i * n2 + j holds
/// Psi(x1_i, x2_j).
class FullHamiltonian {
public:
    FullHamiltonian(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2);

    std::size_t dim() const { return grid1_.n * grid2_.n; }
    const Grid1D& grid1() const { return grid1_; }
    const Grid1D& grid2() const { return grid2_; }
    const ModelSpec& spec() const { return spec_; }
    double weight() const { return grid1_.h * grid2_.h; }

    void apply(const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Ref<Eigen::VectorXd> out) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& in) const;

    /// Nuclear kinetic part -1/(2M) d^2/dx1^2 alone.
    Eigen::VectorXd apply_t1(const Eigen::VectorXd& in) const;

    /// <f, g> on the product grid (h1 h2 weighted).
    double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const { return weight() * f.dot(g); }

    /// Rayleigh quotient <f|H|f> / <f|f>.
    double expectation(const Eigen::VectorXd& f) const;

    /// Dense matrix in the grid-point basis. Refuses above kMaxDenseDim.
    Eigen::MatrixXd to_dense() const;

    /// Gershgorin upper bound on the spectrum.
    double spectral_bound() const;

private:
    ModelSpec spec_;
    Grid1D grid1_;
    Grid1D grid2_;
    double c1_;  // -1/(2M h1^2)
    double c2_;  // -1/(2m h2^2)
    Eigen::VectorXd potential_;
};

FullHamiltonian assemble_full_hamiltonian(const ModelSpec& spec, const Grid1D& grid1, const Grid1D& grid2);

struct ExactOptions {
    std::size_t dense_below = 1024;  // dense eigensolve for dim < dense_below
    KrylovOptions krylov{};
};

struct ExactSolution {
    Eigen::VectorXd energies;   // ascending
    Eigen::MatrixXd states;     // dim x k, normalized on the product grid
    Eigen::VectorXd residuals;  // ||H v - E v|| / ||v||
    Grid1D grid1;
    Grid1D grid2;
    std::size_t iterations = 0;
    std::string method;
};

inline constexpr std::size_t kMaxExactLevels = 20;

ExactSolution solve_exact(const FullHamiltonian& h, std::size_t k, const ExactOptions& options = {});

}  // namespace bolab
