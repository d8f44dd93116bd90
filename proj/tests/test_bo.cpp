#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "bolab/bo.hpp"
#include "bolab/diagnostics.hpp"

using namespace bolab;
using doctest::Approx;

namespace {

ModelSpec harmonic(double M, double k1 = 1.0, double k2 = 1.0) { return {M, 1.0, HarmonicCoupling{k1, k2}}; }

double width(double M, double k1 = 1.0) { return 1.0 / std::sqrt(2.0 * std::sqrt(k1 * M)); }

struct Pipeline {
    ElectronicField field;
    std::map<std::size_t, NuclearSolution> nuclear;
};

Pipeline run(const ModelSpec& spec, const Grid1D& g1, const Grid1D& g2, std::size_t surfaces, std::size_t levels) {
    Pipeline p;
    p.field = scan_pes(spec, g1, g2, surfaces);
    for (std::size_t a = 0; a < surfaces; ++a) p.nuclear.emplace(a, solve_nuclear(p.field, spec, a, levels));
    return p;
}

double kinetic_expectation(const RealGridFunction& theta, double M) {
    return -0.5 / M * theta.grid.h * theta.values.dot(second_derivative_matrix(theta.grid).apply(theta.values));
}

}  // namespace

TEST_CASE("nuclear ladder on the harmonic ground surface") {
    const double M = 100.0;
    const double w = width(M);
    const Pipeline p = run(harmonic(M), build_grid(-7 * w, 7 * w, 256), build_grid(-8, 8, 799), 1, 3);
    const auto& levels = p.nuclear.at(0).levels;
    for (std::size_t n = 0; n < 3; ++n) {
        const double expected = 0.5 + (static_cast<double>(n) + 0.5) * std::sqrt(1.0 / M);
        CHECK(std::abs(levels[n].energy - expected) <= 1e-4);
        CHECK(norm(levels[n].theta) == Approx(1.0).epsilon(1e-10));
        if (n > 0) CHECK(levels[n].energy > levels[n - 1].energy);
        Eigen::Index arg = 0;
        levels[n].theta.values.cwiseAbs().maxCoeff(&arg);
        CHECK(levels[n].theta.values[arg] > 0.0);
    }
}

TEST_CASE("flat surface gives particle-in-a-box levels") {
    const double M = 3.0;
    const Grid1D g1 = build_grid(0.0, 2.0, 400);
    const Pipeline p = run({M, 1.0, SeparableHarmonic{0.0, 1.0}}, g1, build_grid(-6, 6, 48), 1, 3);
    const double c = p.field.lambdas(0, 0);
    for (std::size_t n = 0; n < 3; ++n) {
        const double k = static_cast<double>(n + 1) * std::numbers::pi / g1.length();
        CHECK(p.nuclear.at(0).levels[n].energy - c == Approx(k * k / (2.0 * M)).epsilon(1e-3));
    }
}

TEST_CASE("soft-Coulomb nuclear ground level converges to its harmonic estimate") {
    const ModelSpec spec{2000.0, 1.0, SoftCoulomb{1.0, 1.0, 1.0}};
    const Grid1D g2 = build_grid(-20.0, 20.0, 160);
    const double w = nuclear_rms_width(spec, g2);
    const double e64 = run(spec, build_grid(-10 * w, 10 * w, 64), g2, 1, 1).nuclear.at(0).levels[0].energy;
    const double e128 = run(spec, build_grid(-10 * w, 10 * w, 128), g2, 1, 1).nuclear.at(0).levels[0].energy;
    const double richardson = e128 + (e128 - e64) / 3.0;
    CHECK(std::abs(e128 - e64) <= 5e-5);
    const double lambda0 = solve_clamped_slice(spec, g2, 0.0, 1).energies[0];
    const double estimate = lambda0 + 0.5 * std::sqrt(surface_stiffness(spec, g2) / spec.M);
    CHECK(std::abs(richardson - estimate) <= 1e-4);
}

TEST_CASE("nuclear solve argument checks") {
    const Pipeline p = run(harmonic(10.0), build_grid(-2, 2, 16), build_grid(-6, 6, 32), 2, 2);
    CHECK_THROWS_AS(solve_nuclear(p.field, harmonic(10.0), 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(solve_nuclear(p.field, harmonic(10.0), 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(solve_nuclear(p.field, harmonic(10.0), 0, 17), std::invalid_argument);
    CHECK_THROWS_AS(assemble_product_state(p.nuclear.at(0), p.field, 2), std::invalid_argument);
    const Pipeline other = run(harmonic(10.0), build_grid(-2, 2, 18), build_grid(-6, 6, 32), 1, 1);
    CHECK_THROWS_AS(assemble_product_state(other.nuclear.at(0), p.field, 0), std::invalid_argument);
}

TEST_CASE("separable product state is an exact tensor product") {
    const ModelSpec spec{20.0, 1.0, SeparableHarmonic{1.0, 1.0}};
    const Pipeline p = run(spec, build_grid(-3, 3, 30), build_grid(-7, 7, 40), 2, 2);
    for (std::size_t a = 0; a < 2; ++a) {
        const ProductState s = assemble_product_state(p.nuclear.at(a), p.field, 1);
        const RowMatrix tensor = p.nuclear.at(a).levels[1].theta.values * p.field.psi[a].row(0);
        CHECK((s.amplitudes - tensor).cwiseAbs().maxCoeff() <= 1e-12 * tensor.cwiseAbs().maxCoeff());
        CHECK(s.norm() == Approx(1.0).epsilon(1e-12));
        CHECK(s.surface == a);
        CHECK(s.level == 1);
    }
}

TEST_CASE("harmonic product states: Rayleigh quotient, orthogonality, variational bound") {
    const ModelSpec spec = harmonic(2000.0);
    const double w = width(2000.0);
    const Pipeline p = run(spec, build_grid(-10 * w, 10 * w, 64), build_grid(-10, 10, 128), 3, 3);
    const FullHamiltonian h(spec, p.field.grid1, p.field.grid2);
    const double exact0 = solve_exact(h, 1).energies[0];
    const double analytic = analytic_normal_modes(spec).ground_energy;

    std::vector<ProductState> states;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t n = 0; n < 3; ++n) states.push_back(assemble_product_state(p.nuclear.at(a), p.field, n));
    }
    const double rq = rayleigh_quotient(h, states.front());
    CHECK(std::abs(rq - analytic) / analytic <= 5e-3);
    for (const auto& s : states) {
        CHECK(s.norm() == Approx(1.0).epsilon(1e-10));
        CHECK(rayleigh_quotient(h, s) >= exact0 - 1e-10 * std::abs(exact0));
    }
    for (std::size_t u = 0; u < states.size(); ++u) {
        for (std::size_t v = u + 1; v < states.size(); ++v) {
            CHECK(std::abs(h.inner(states[u].flat(), states[v].flat())) <= 1e-6);
        }
    }
}

TEST_CASE("adiabatic residuals") {
    SUBCASE("separable potential") {
        const Pipeline p = run({5.0, 1.0, SeparableHarmonic{1.0, 2.0}}, build_grid(-2, 2, 20), build_grid(-6, 6, 50), 2, 1);
        for (std::size_t a = 0; a < 2; ++a) CHECK(adiabatic_residual(p.field, a).max <= 1e-10);
    }
    SUBCASE("harmonic ground surface: shifted-Gaussian derivative norm") {
        const Pipeline p = run(harmonic(100.0), build_grid(-1, 1, 40), build_grid(-10, 10, 799), 1, 1);
        const AdiabaticResidual r = adiabatic_residual(p.field, 0);
        REQUIRE(r.norms.size() == 38);
        CHECK(r.x1[0] == Approx(p.field.grid1.point(1)));
        // || d/dx1 (mw/pi)^(1/4) exp(-mw (x2-x1)^2 / 2) || = sqrt(mw/2), mw = 1.
        CHECK(std::abs(r.max - std::sqrt(0.5)) <= 1e-3);
        CHECK(r.norms.maxCoeff() - r.norms.minCoeff() <= 1e-6);
        CHECK(r.mean == Approx(r.norms.mean()));
    }
    SUBCASE("too few slices") {
        ElectronicField f;
        f.grid1 = Grid1D{0.0, 1.0, 2, 1.0 / 3.0};
        f.n_surfaces = 1;
        f.psi.assign(1, RowMatrix::Zero(2, 4));
        CHECK_THROWS_AS(adiabatic_residual(f, 0), std::invalid_argument);
    }
}

TEST_CASE("Born-Huang correction relative to the gap shrinks as the nucleus gets heavier") {
    double previous = std::numeric_limits<double>::infinity();
    for (double M : {10.0, 100.0, 1000.0, 2000.0}) {
        const double w = width(M);
        const Pipeline p = run(harmonic(M), build_grid(-10 * w, 10 * w, 48), build_grid(-10, 10, 128), 2, 1);
        const Eigen::VectorXd bh = p.nuclear.at(0).born_huang;
        const Eigen::VectorXd& theta = p.nuclear.at(0).levels[0].theta.values;
        const double contribution = p.field.grid1.h * theta.cwiseAbs2().dot(bh);
        const double gap = (p.field.lambdas.row(1) - p.field.lambdas.row(0)).minCoeff();
        CHECK(contribution / gap < previous);
        previous = contribution / gap;
    }
}

TEST_CASE("Born-Huang term raises the nuclear levels when switched on") {
    const double w = width(50.0);
    const ElectronicField f = scan_pes(harmonic(50.0), build_grid(-10 * w, 10 * w, 40), build_grid(-8, 8, 80), 1);
    NuclearOptions on;
    on.include_born_huang = true;
    const NuclearSolution plain = solve_nuclear(f, harmonic(50.0), 0, 2);
    const NuclearSolution corrected = solve_nuclear(f, harmonic(50.0), 0, 2, on);
    CHECK_FALSE(plain.born_huang_included);
    CHECK(corrected.born_huang_included);
    CHECK(corrected.levels[0].energy > plain.levels[0].energy);
    CHECK((plain.born_huang - corrected.born_huang).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("T1 coupling matrix") {
    SUBCASE("separable potential: diagonal matrix of bare nuclear kinetic energies") {
        const ModelSpec spec{20.0, 1.0, SeparableHarmonic{1.0, 1.0}};
        const Pipeline p = run(spec, build_grid(-3, 3, 30), build_grid(-7, 7, 40), 3, 2);
        const std::vector<LevelRef> sel = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}};
        const T1Coupling t = t1_coupling_matrix(p.field, p.nuclear, sel);
        for (Eigen::Index r = 0; r < 5; ++r) {
            for (Eigen::Index c = 0; c < 5; ++c) {
                if (r == c) continue;
                if (sel[static_cast<std::size_t>(r)].surface == sel[static_cast<std::size_t>(c)].surface) continue;
                CHECK(std::abs(t.matrix(r, c)) <= 1e-10);
            }
            const auto& ref = sel[static_cast<std::size_t>(r)];
            const double bare = kinetic_expectation(p.nuclear.at(ref.surface).levels[ref.level].theta, 20.0);
            CHECK(std::abs(t.matrix(r, r) - bare) <= 1e-10);
        }
        CHECK(t.asymmetry <= 1e-12);
    }
    SUBCASE("harmonic M/m = 2000: small off-diagonal couplings, symmetric") {
        const double w = width(2000.0);
        const Pipeline p = run(harmonic(2000.0), build_grid(-10 * w, 10 * w, 64), build_grid(-10, 10, 128), 3, 1);
        const T1Coupling t = t1_coupling_matrix(p.field, p.nuclear, {{0, 0}, {1, 0}, {2, 0}});
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index a = 0; a < 2; ++a) gap = std::min(gap, (p.field.lambdas.row(a + 1) - p.field.lambdas.row(a)).minCoeff());
        CHECK(t.max_off_diagonal / gap <= 0.05);
        CHECK(t.asymmetry <= 1e-8 * t.matrix.cwiseAbs().maxCoeff());
        CHECK((t.matrix - (t.theta_term + t.cross_term + t.psi_term)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("diagonal entry is nuclear kinetic energy plus Born-Huang term") {
        const double w = width(100.0);
        const Pipeline p = run(harmonic(100.0), build_grid(-10 * w, 10 * w, 96), build_grid(-10, 10, 256), 1, 2);
        const T1Coupling t = t1_coupling_matrix(p.field, p.nuclear, {{0, 0}, {0, 1}});
        for (std::size_t n = 0; n < 2; ++n) {
            const auto& theta = p.nuclear.at(0).levels[n].theta;
            const double bh = theta.grid.h * theta.values.cwiseAbs2().dot(p.nuclear.at(0).born_huang);
            const double expected = kinetic_expectation(theta, 100.0) + bh;
            CHECK(t.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) == Approx(expected).epsilon(2e-3));
        }
    }
    SUBCASE("selection checks") {
        const Pipeline p = run(harmonic(10.0), build_grid(-2, 2, 16), build_grid(-6, 6, 32), 2, 1);
        CHECK_THROWS_AS(t1_coupling_matrix(p.field, p.nuclear, {}), std::invalid_argument);
        CHECK_THROWS_AS(t1_coupling_matrix(p.field, p.nuclear, {{0, 1}}), std::invalid_argument);
        CHECK_THROWS_AS(t1_coupling_matrix(p.field, p.nuclear, {{3, 0}}), std::invalid_argument);
    }
}
