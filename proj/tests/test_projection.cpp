#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bolab/bo.hpp"
#include "bolab/linalg.hpp"
#include "bolab/projection.hpp"

using namespace bolab;
using doctest::Approx;

namespace {

ModelSpec harmonic(double M) { return {M, 1.0, HarmonicCoupling{1.0, 1.0}}; }

double width(double M) { return 1.0 / std::sqrt(2.0 * std::sqrt(M)); }

Eigen::VectorXd probe(std::size_t dim, std::uint64_t seed) { return seeded_uniform_matrix(dim, 1, seed).col(0); }

}  // namespace

TEST_CASE("projector algebra") {
    const ModelSpec spec = harmonic(20.0);
    const ElectronicField f = scan_pes(spec, build_grid(-2, 2, 14), build_grid(-6, 6, 30), 3);
    const FullHamiltonian h(spec, f.grid1, f.grid2);
    for (std::size_t N = 1; N <= 3; ++N) {
        const Projector p = build_projector(f, N);
        CHECK(p.subspace_dim() == N * 14);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Eigen::VectorXd v = probe(h.dim(), 10 * N + s);
            const Eigen::VectorXd w = probe(h.dim(), 500 + 10 * N + s);
            const Eigen::VectorXd pv = p.apply(v);
            CHECK((p.apply(pv) - pv).cwiseAbs().maxCoeff() <= 1e-12 * pv.cwiseAbs().maxCoeff());
            CHECK(std::abs(h.inner(w, pv) - h.inner(p.apply(w), v)) <= 1e-12 * std::sqrt(h.inner(v, v) * h.inner(w, w)));
            // The complement is annihilated.
            const Eigen::VectorXd q = v - pv;
            CHECK(p.apply(q).cwiseAbs().maxCoeff() <= 1e-12 * v.cwiseAbs().maxCoeff());
            // Coordinates are an isometry onto the subspace.
            const Eigen::VectorXd c = p.coordinates(v);
            CHECK(c.squaredNorm() == Approx(h.inner(pv, pv)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(build_projector(f, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_projector(f, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_projector(f, 1).apply(Eigen::VectorXd::Ones(7)), std::invalid_argument);
}

TEST_CASE("a product state on a retained surface is left unchanged") {
    const ModelSpec spec = harmonic(50.0);
    const ElectronicField f = scan_pes(spec, build_grid(-1, 1, 16), build_grid(-7, 7, 40), 2);
    const NuclearSolution nuc = solve_nuclear(f, spec, 1, 2);
    const Eigen::VectorXd v = assemble_product_state(nuc, f, 1).flat();
    CHECK((build_projector(f, 2).apply(v) - v).cwiseAbs().maxCoeff() <= 1e-12 * v.cwiseAbs().maxCoeff());
    CHECK(build_projector(f, 1).apply(v).cwiseAbs().maxCoeff() <= 1e-12 * v.cwiseAbs().maxCoeff());
}

TEST_CASE("full rank projector is the identity and reproduces the full spectrum") {
    const ModelSpec spec = harmonic(3.0);
    const Grid1D g1 = build_grid(-2, 2, 10);
    const Grid1D g2 = build_grid(-4, 4, 9);
    const ElectronicField f = scan_pes(spec, g1, g2, 9);
    const Projector p = build_projector(f, 9);
    const FullHamiltonian h(spec, g1, g2);
    const Eigen::VectorXd v = probe(h.dim(), 3);
    CHECK((p.apply(v) - v).cwiseAbs().maxCoeff() <= 1e-12);

    const EffectiveSolution e = solve_effective(p, h, 6);
    const Eigen::VectorXd full = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.to_dense()).eigenvalues();
    for (Eigen::Index k = 0; k < 6; ++k) CHECK(std::abs(e.energies[k] - full[k]) <= 1e-10 * std::abs(full[k]));
}

TEST_CASE("effective operator vanishes on the complement") {
    const ModelSpec spec = harmonic(20.0);
    const ElectronicField f = scan_pes(spec, build_grid(-2, 2, 14), build_grid(-6, 6, 30), 2);
    const FullHamiltonian h(spec, f.grid1, f.grid2);
    const Projector p = build_projector(f, 2);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Eigen::VectorXd v = probe(h.dim(), 40 + s);
        const Eigen::VectorXd q = v - p.apply(v);
        CHECK(apply_effective(p, h, q).cwiseAbs().maxCoeff() <= 1e-10 * h.spectral_bound() * q.cwiseAbs().maxCoeff());
        const Eigen::VectorXd w = probe(h.dim(), 90 + s);
        CHECK(std::abs(h.inner(w, apply_effective(p, h, v)) - h.inner(apply_effective(p, h, w), v)) <=
              1e-10 * h.spectral_bound() * std::sqrt(h.inner(v, v) * h.inner(w, w)));
    }
}

TEST_CASE("subspace matrix agrees with the matrix-free effective operator") {
    const ModelSpec spec = harmonic(20.0);
    const ElectronicField f = scan_pes(spec, build_grid(-2, 2, 12), build_grid(-6, 6, 24), 3);
    const FullHamiltonian h(spec, f.grid1, f.grid2);
    const Projector p = build_projector(f, 2);
    const EffectiveSolution e = solve_effective(p, h, 3);
    const Eigen::VectorXd c = probe(p.subspace_dim(), 5);
    const Eigen::VectorXd direct = p.coordinates(h.apply(p.synthesize(c)));
    CHECK((e.subspace_matrix * c - direct).cwiseAbs().maxCoeff() <= 1e-10 * direct.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(e.residuals[k] <= 1e-9 * std::abs(e.energies[k]));
}

TEST_CASE("Rayleigh-Ritz bounds tighten as the rank grows") {
    const ModelSpec spec = harmonic(10.0);
    const double w = width(10.0);
    const ElectronicField f = scan_pes(spec, build_grid(-8 * w, 8 * w, 24), build_grid(-7, 7, 36), 4);
    const FullHamiltonian h(spec, f.grid1, f.grid2);
    ExactOptions dense;
    dense.dense_below = 1u << 20;
    const ExactSolution exact = solve_exact(h, 3, dense);
    Eigen::VectorXd previous = Eigen::VectorXd::Constant(3, std::numeric_limits<double>::infinity());
    for (std::size_t N = 1; N <= 4; ++N) {
        const EffectiveSolution e = solve_effective(build_projector(f, N), h, 3);
        CHECK(e.subspace_dim == N * 24);
        CHECK(e.rank == N);
        for (Eigen::Index k = 0; k < 3; ++k) {
            CHECK(e.energies[k] >= exact.energies[k] - 1e-10);
            CHECK(e.energies[k] <= previous[k] + 1e-12);
        }
        previous = e.energies;
    }
    CHECK_THROWS_AS(solve_effective(build_projector(f, 1), h, 0), std::invalid_argument);
    CHECK_THROWS_AS(solve_effective(build_projector(f, 1), h, 25), std::invalid_argument);
    const FullHamiltonian other(spec, build_grid(-1, 1, 24), f.grid2);
    CHECK_THROWS_AS(solve_effective(build_projector(f, 1), other, 1), std::invalid_argument);
}

TEST_CASE("single-surface effective ground energy at M/m = 2000") {
    const ModelSpec spec = harmonic(2000.0);
    const double w = width(2000.0);
    const ElectronicField f = scan_pes(spec, build_grid(-10 * w, 10 * w, 64), build_grid(-10, 10, 128), 1);
    const FullHamiltonian h(spec, f.grid1, f.grid2);
    const EffectiveSolution e = solve_effective(build_projector(f, 1), h, 1);
    const double analytic = analytic_normal_modes(spec).ground_energy;
    CHECK(std::abs(e.energies[0] - analytic) / analytic <= 5e-3);
    // With one surface, P H P is the single-surface problem including the Born-Huang term.
    NuclearOptions bh;
    bh.include_born_huang = true;
    const double nuclear = solve_nuclear(f, spec, 0, 1, bh).levels[0].energy;
    CHECK(e.energies[0] == Approx(nuclear).epsilon(1e-4));
}
