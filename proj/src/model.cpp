#include "bolab/model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace bolab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const ModelSpec& spec) {
    require(std::isfinite(spec.M) && spec.M > 0.0, fmt::format("nuclear mass M must be positive, got {}", spec.M));
    require(std::isfinite(spec.m) && spec.m > 0.0, fmt::format("electronic mass m must be positive, got {}", spec.m));
    std::visit(overloaded{
                   [](const HarmonicCoupling& p) {
                       require(p.k1 >= 0.0, "harmonic_coupling: k1 must be >= 0");
                       require(p.k2 > 0.0, "harmonic_coupling: k2 must be > 0");
                   },
                   [](const SoftCoulomb& p) {
                       require(p.z > 0.0, "soft_coulomb: z must be > 0");
                       require(p.s > 0.0, "soft_coulomb: s must be > 0");
                       require(p.k1 >= 0.0, "soft_coulomb: k1 must be >= 0");
                   },
                   [](const SeparableHarmonic& p) {
                       require(p.k1 >= 0.0 && p.k2 >= 0.0, "separable_harmonic: k1, k2 must be >= 0");
                   },
               },
               spec.potential);
}

std::string family_name(const Potential& potential) {
    return std::visit(overloaded{
                          [](const HarmonicCoupling&) { return std::string("harmonic_coupling"); },
                          [](const SoftCoulomb&) { return std::string("soft_coulomb"); },
                          [](const SeparableHarmonic&) { return std::string("separable_harmonic"); },
                      },
                      potential);
}

double evaluate_potential(const ModelSpec& spec, double x1, double x2) {
    return std::visit(overloaded{
                          [&](const HarmonicCoupling& p) {
                              const double d = x2 - x1;
                              return 0.5 * p.k1 * x1 * x1 + 0.5 * p.k2 * d * d;
                          },
                          [&](const SoftCoulomb& p) {
                              const double d = x2 - x1;
                              return 0.5 * p.k1 * x1 * x1 - p.z / std::sqrt(d * d + p.s * p.s);
                          },
                          [&](const SeparableHarmonic& p) {
                              return 0.5 * p.k1 * x1 * x1 + 0.5 * p.k2 * x2 * x2;
                          },
                      },
                      spec.potential);
}

double kappa(const ModelSpec& spec) {
    require(spec.M > 0.0 && spec.m > 0.0, "kappa: masses must be positive");
    return std::pow(spec.m / spec.M, 0.25);
}

ModelSpec with_mass_ratio(const ModelSpec& spec, double ratio) {
    require(std::isfinite(ratio) && ratio > 0.0, fmt::format("mass ratio must be positive, got {}", ratio));
    ModelSpec out = spec;
    out.M = ratio * spec.m;
    return out;
}

double closed_form_surface_stiffness(const ModelSpec& spec) {
    if (const auto* h = std::get_if<HarmonicCoupling>(&spec.potential)) return h->k1;
    if (const auto* s = std::get_if<SeparableHarmonic>(&spec.potential)) return s->k1;
    return 0.0;
}

NormalModeResult analytic_normal_modes(const ModelSpec& spec) {
    const auto* p = std::get_if<HarmonicCoupling>(&spec.potential);
    if (p == nullptr) {
        throw std::invalid_argument("analytic_normal_modes: only the harmonic_coupling family has a closed form");
    }
    validate(spec);
    if (!(p->k1 > 0.0)) {
        throw std::invalid_argument("analytic_normal_modes: k1 = 0 leaves a zero-frequency mode");
    }
    // Mass-weighted stiffness [[(k1+k2)/M, -k2/sqrt(Mm)], [-k2/sqrt(Mm), k2/m]].
    const double a = (p->k1 + p->k2) / spec.M;
    const double d = p->k2 / spec.m;
    const double half_trace = 0.5 * (a + d);
    const double det = p->k1 * p->k2 / (spec.M * spec.m);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + p->k2 * p->k2 / (spec.M * spec.m));
    const double upper = half_trace + disc;
    const double lower = det / upper;  // avoids cancellation in half_trace - disc

    NormalModeResult out;
    out.omega_plus = std::sqrt(upper);
    out.omega_minus = std::sqrt(lower);
    out.ground_energy = 0.5 * (out.omega_plus + out.omega_minus);
    return out;
}

}  // namespace bolab
