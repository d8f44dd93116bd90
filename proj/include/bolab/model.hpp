#pragma once

#include <string>
#include <variant>

namespace bolab {

/// W = 1/2 k1 x1^2 + 1/2 k2 (x2 - x1)^2. Exactly solvable.
struct HarmonicCoupling {
    double k1 = 1.0;
    double k2 = 1.0;
};

/// W = 1/2 k1 x1^2 - z / sqrt((x2 - x1)^2 + s^2). The k1 term confines the
/// nuclear coordinate in place of a centre-of-mass separation.
struct SoftCoulomb {
    double z = 1.0;
    double s = 1.0;
    double k1 = 0.0;
};

/// W = 1/2 k1 x1^2 + 1/2 k2 x2^2. No coupling; k1 = k2 = 0 gives a free box.
struct SeparableHarmonic {
    double k1 = 1.0;
    double k2 = 1.0;
};

using Potential = std::variant<HarmonicCoupling, SoftCoulomb, SeparableHarmonic>;

/// Two-coordinate model molecule: nuclear mass M on x1, electronic mass m on x2.
struct ModelSpec {
    double M = 1.0;
    double m = 1.0;
    Potential potential = HarmonicCoupling{};
};

/// Throws std::invalid_argument when masses or potential parameters are out of range.
void validate(const ModelSpec& spec);

std::string family_name(const Potential& potential);

double evaluate_potential(const ModelSpec& spec, double x1, double x2);

/// Born-Oppenheimer small parameter (m/M)^(1/4).
double kappa(const ModelSpec& spec);

/// Same model with the nuclear mass replaced by ratio * m.
ModelSpec with_mass_ratio(const ModelSpec& spec, double ratio);

/// Confinement stiffness of the lowest surface near x1 = 0 when it is known
/// in closed form (harmonic families); 0 otherwise.
double closed_form_surface_stiffness(const ModelSpec& spec);

struct NormalModeResult {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double ground_energy = 0.0;

    double level(int n_plus, int n_minus) const {
        return (n_plus + 0.5) * omega_plus + (n_minus + 0.5) * omega_minus;
    }
};

/// Closed-form normal modes of the coupled-oscillator model. Rejects every
/// other family and k1 = 0 (a free centre-of-mass mode has no discrete spectrum).
NormalModeResult analytic_normal_modes(const ModelSpec& spec);

}  // namespace bolab
