#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bolab/model.hpp"

using namespace bolab;
using doctest::Approx;

namespace {

ModelSpec harmonic(double M, double m, double k1, double k2) { return {M, m, HarmonicCoupling{k1, k2}}; }

// Frequencies from a brute-force eigensolve of the mass-weighted stiffness matrix.
std::pair<double, double> brute_force_modes(double M, double m, double k1, double k2) {
    Eigen::Matrix2d k;
    k << k1 + k2, -k2, -k2, k2;
    Eigen::Matrix2d w = Eigen::Vector2d(1.0 / std::sqrt(M), 1.0 / std::sqrt(m)).asDiagonal() * k *
                        Eigen::Vector2d(1.0 / std::sqrt(M), 1.0 / std::sqrt(m)).asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(w);
    return {std::sqrt(es.eigenvalues()[1]), std::sqrt(es.eigenvalues()[0])};
}

}  // namespace

TEST_CASE("potential values") {
    CHECK(evaluate_potential(harmonic(1, 1, 1, 1), 0.0, 0.0) == 0.0);
    CHECK(evaluate_potential(harmonic(1, 1, 1, 1), 1.0, 0.0) == 1.0);
    CHECK(evaluate_potential({1, 1, SoftCoulomb{1.0, 1.0, 0.0}}, 0.7, 0.7) == -1.0);
    CHECK(evaluate_potential({1, 1, SeparableHarmonic{2.0, 4.0}}, 1.0, 0.5) == Approx(1.0 + 0.5));
}

TEST_CASE("harmonic coupling depends on x2 only through x2 - x1") {
    const ModelSpec spec = harmonic(3.0, 1.0, 0.8, 1.7);
    for (double x1 : {-2.0, -0.25, 0.0, 1.5}) {
        for (double d : {-1.0, 0.0, 0.5, 3.0}) {
            CHECK(evaluate_potential(spec, x1, x1 + d) ==
                  Approx(evaluate_potential(spec, 0.0, d) + 0.5 * 0.8 * x1 * x1).epsilon(1e-14));
        }
    }
}

TEST_CASE("kappa") {
    CHECK(kappa(harmonic(2000, 1, 1, 1)) >= 0.1494);
    CHECK(kappa(harmonic(2000, 1, 1, 1)) <= 0.1496);
    CHECK(kappa(harmonic(1, 1, 1, 1)) == 1.0);
    CHECK(kappa(harmonic(16, 1, 1, 1)) == Approx(0.5).epsilon(1e-15));
    CHECK(kappa(harmonic(10, 1, 1, 1)) > kappa(harmonic(11, 1, 1, 1)));
    CHECK(kappa(harmonic(7.0 * 13.0, 7.0, 1, 1)) == Approx(kappa(harmonic(13.0, 1.0, 1, 1))).epsilon(1e-15));
    CHECK_THROWS(kappa(harmonic(0, 1, 1, 1)));
}

TEST_CASE("with_mass_ratio rescales the nuclear mass") {
    const ModelSpec s = with_mass_ratio(harmonic(1, 2, 1, 1), 50.0);
    CHECK(s.M == 100.0);
    CHECK(s.m == 2.0);
    CHECK_THROWS(with_mass_ratio(s, -1.0));
}

TEST_CASE("normal modes of the equal-mass oscillator") {
    const NormalModeResult r = analytic_normal_modes(harmonic(1, 1, 1, 1));
    CHECK(r.omega_plus == Approx(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-14));
    CHECK(r.omega_minus == Approx(std::sqrt((3.0 - std::sqrt(5.0)) / 2.0)).epsilon(1e-14));
    CHECK(r.omega_plus == Approx(1.6180).epsilon(1e-4));
    CHECK(r.omega_minus == Approx(0.6180).epsilon(1e-4));
    CHECK(r.ground_energy == Approx(1.118033988749895).epsilon(1e-14));
    CHECK(r.level(0, 0) == Approx(r.ground_energy));
    CHECK(r.level(1, 2) == Approx(1.5 * r.omega_plus + 2.5 * r.omega_minus));
}

TEST_CASE("weak coupling decouples the oscillators") {
    const NormalModeResult r = analytic_normal_modes(harmonic(1.0, 1.0, 1.0, 1e-8));
    CHECK(r.omega_plus == Approx(1.0).epsilon(1e-7));
    CHECK(r.omega_minus == Approx(std::sqrt(1e-8)).epsilon(1e-6));
}

TEST_CASE("normal modes agree with a brute-force 2x2 eigensolve") {
    for (const auto& [M, k1, k2] : {std::tuple{2000.0, 1.0, 1.0}, std::tuple{10.0, 0.3, 2.0}, std::tuple{1.0, 4.0, 0.5}}) {
        const NormalModeResult r = analytic_normal_modes(harmonic(M, 1.0, k1, k2));
        const auto [wp, wm] = brute_force_modes(M, 1.0, k1, k2);
        CHECK(std::abs(r.omega_plus - wp) <= 1e-10);
        CHECK(std::abs(r.omega_minus - wm) <= 1e-10);
        CHECK(std::abs(r.ground_energy - 0.5 * (wp + wm)) <= 1e-10);
        CHECK(r.omega_plus >= r.omega_minus);
        CHECK(r.omega_minus > 0.0);
    }
}

TEST_CASE("normal modes reject families without a closed form") {
    CHECK_THROWS_AS(analytic_normal_modes({1, 1, SoftCoulomb{}}), std::invalid_argument);
    CHECK_THROWS_AS(analytic_normal_modes({1, 1, SeparableHarmonic{}}), std::invalid_argument);
    CHECK_THROWS_AS(analytic_normal_modes(harmonic(1, 1, 0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(harmonic(1, 1, 0.0, 1.0)));
    CHECK_THROWS_AS(validate(harmonic(0, 1, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(validate(harmonic(1, -1, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(validate(harmonic(1, 1, -1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(validate(harmonic(1, 1, 1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(validate({1, 1, SoftCoulomb{0.0, 1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({1, 1, SoftCoulomb{1.0, 0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate({1, 1, SoftCoulomb{1.0, 1.0, -1.0}}), std::invalid_argument);
    CHECK(family_name(SoftCoulomb{}) == "soft_coulomb");
    CHECK(family_name(HarmonicCoupling{}) == "harmonic_coupling");
    CHECK(family_name(SeparableHarmonic{}) == "separable_harmonic");
}
