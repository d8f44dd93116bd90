#include "bolab/bo.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "bolab/errors.hpp"
#include "bolab/linalg.hpp"

namespace bolab {

Eigen::VectorXd born_huang_correction(const ElectronicField& field, std::size_t a, double nuclear_mass) {
    if (a >= field.n_surfaces) throw std::out_of_range("born_huang_correction: surface index out of range");
    const auto& psi = field.psi[a];
    const auto n1 = static_cast<Eigen::Index>(field.grid1.n);
    const double h1 = field.grid1.h;
    const double h2 = field.grid2.h;
    Eigen::VectorXd out(n1);
    for (Eigen::Index i = 0; i < n1; ++i) {
        double sq = 0.0;
        if (i == 0) {
            sq = (psi.row(1) - psi.row(0)).squaredNorm() / (h1 * h1);
        } else if (i == n1 - 1) {
            sq = (psi.row(i) - psi.row(i - 1)).squaredNorm() / (h1 * h1);
        } else {
            sq = (psi.row(i + 1) - psi.row(i - 1)).squaredNorm() / (4.0 * h1 * h1);
        }
        out[i] = 0.5 / nuclear_mass * h2 * sq;
    }
    return out;
}

NuclearSolution solve_nuclear(const ElectronicField& field, const ModelSpec& spec, std::size_t a,
                              std::size_t n_levels, const NuclearOptions& options) {
    validate(spec);
    if (a >= field.n_surfaces) {
        throw std::invalid_argument(fmt::format("solve_nuclear: surface {} not in field of {}", a, field.n_surfaces));
    }
    if (n_levels == 0 || n_levels > field.grid1.n) {
        throw std::invalid_argument(fmt::format("solve_nuclear: need 1 <= levels <= n1 = {}", field.grid1.n));
    }
    NuclearSolution sol;
    sol.surface_index = a;
    sol.nuclear_mass = spec.M;
    sol.born_huang = born_huang_correction(field, a, spec.M);
    sol.born_huang_included = options.include_born_huang;

    SymTridiagonal op = second_derivative_matrix(field.grid1);
    const double c = -0.5 / spec.M;
    op.diag *= c;
    op.off *= c;
    op.diag += field.lambdas.row(static_cast<Eigen::Index>(a)).transpose();
    if (options.include_born_huang) op.diag += sol.born_huang;

    EigenPairs pairs;
    try {
        pairs = lowest_eigenpairs_tridiagonal(op, n_levels);
    } catch (const SolverError& e) {
        throw SolverError(fmt::format("nuclear equation on surface {}: {}", a, e.what()), e.residuals());
    }
    const double scale = 1.0 / std::sqrt(field.grid1.h);
    for (Eigen::Index n = 0; n < pairs.values.size(); ++n) {
        Eigen::VectorXd theta = pairs.vectors.col(n) * scale;
        Eigen::Index arg = 0;
        theta.cwiseAbs().maxCoeff(&arg);
        if (theta[arg] < 0.0) theta = -theta;
        sol.levels.push_back({pairs.values[n], RealGridFunction(field.grid1, std::move(theta))});
    }
    return sol;
}

Eigen::VectorXd ProductState::flat() const {
    return Eigen::Map<const Eigen::VectorXd>(amplitudes.data(), amplitudes.size());
}

double ProductState::norm() const { return std::sqrt(grid1.h * grid2.h * amplitudes.squaredNorm()); }

ProductState assemble_product_state(const NuclearSolution& sol, const ElectronicField& field, std::size_t n) {
    if (n >= sol.levels.size()) {
        throw std::invalid_argument(fmt::format("assemble_product_state: level {} not solved ({} available)", n,
                                                sol.levels.size()));
    }
    const auto& theta = sol.levels[n].theta;
    if (!(theta.grid == field.grid1) || sol.surface_index >= field.n_surfaces) {
        throw std::invalid_argument("assemble_product_state: nuclear solution does not match the electronic field");
    }
    ProductState state;
    state.grid1 = field.grid1;
    state.grid2 = field.grid2;
    state.surface = sol.surface_index;
    state.level = n;
    state.amplitudes = theta.values.asDiagonal() * field.psi[sol.surface_index];
    state.amplitudes /= state.norm();
    return state;
}

double rayleigh_quotient(const FullHamiltonian& h, const ProductState& state) {
    if (!(h.grid1() == state.grid1) || !(h.grid2() == state.grid2)) {
        throw std::invalid_argument("rayleigh_quotient: state and Hamiltonian use different grids");
    }
    return h.expectation(state.flat());
}

AdiabaticResidual adiabatic_residual(const ElectronicField& field, std::size_t a) {
    if (a >= field.n_surfaces) throw std::invalid_argument("adiabatic_residual: surface index out of range");
    const auto n1 = static_cast<Eigen::Index>(field.grid1.n);
    if (n1 < 3) throw std::invalid_argument("adiabatic_residual: need at least three slices");
    const auto& psi = field.psi[a];
    const double h1 = field.grid1.h;
    const double sqrt_h2 = std::sqrt(field.grid2.h);

    AdiabaticResidual out;
    out.x1.resize(n1 - 2);
    out.norms.resize(n1 - 2);
    for (Eigen::Index i = 1; i + 1 < n1; ++i) {
        out.x1[i - 1] = field.grid1.point(static_cast<std::size_t>(i));
        out.norms[i - 1] = sqrt_h2 * (psi.row(i + 1) - psi.row(i - 1)).norm() / (2.0 * h1);
    }
    out.max = out.norms.maxCoeff();
    out.mean = out.norms.mean();
    return out;
}

T1Coupling t1_coupling_matrix(const ElectronicField& field, const std::map<std::size_t, NuclearSolution>& nuclear,
                              const std::vector<LevelRef>& levels) {
    if (levels.empty()) throw std::invalid_argument("t1_coupling_matrix: empty level selection");
    double mass = 0.0;
    for (const auto& ref : levels) {
        const auto it = nuclear.find(ref.surface);
        if (it == nuclear.end() || ref.surface >= field.n_surfaces) {
            throw std::invalid_argument(fmt::format("t1_coupling_matrix: no nuclear solution for surface {}", ref.surface));
        }
        if (ref.level >= it->second.levels.size()) {
            throw std::invalid_argument(fmt::format("t1_coupling_matrix: level {} on surface {} not solved", ref.level,
                                                    ref.surface));
        }
        if (!(it->second.levels[ref.level].theta.grid == field.grid1)) {
            throw std::invalid_argument("t1_coupling_matrix: nuclear grid differs from the electronic field");
        }
        if (mass != 0.0 && mass != it->second.nuclear_mass) {
            throw std::invalid_argument("t1_coupling_matrix: nuclear solutions disagree on the mass");
        }
        mass = it->second.nuclear_mass;
    }

    const auto n1 = static_cast<Eigen::Index>(field.grid1.n);
    const auto count = static_cast<Eigen::Index>(levels.size());
    const double h1 = field.grid1.h;
    const double h2 = field.grid2.h;
    const double inv_h2 = 1.0 / (h1 * h1);
    const double prefactor = -0.5 / mass;

    T1Coupling out;
    out.labels = levels;
    out.theta_term = Eigen::MatrixXd::Zero(count, count);
    out.cross_term = Eigen::MatrixXd::Zero(count, count);
    out.psi_term = Eigen::MatrixXd::Zero(count, count);

    auto theta_at = [n1](const Eigen::VectorXd& t, Eigen::Index i) { return (i < 0 || i >= n1) ? 0.0 : t[i]; };

    for (Eigen::Index r = 0; r < count; ++r) {
        const auto& ref_b = levels[static_cast<std::size_t>(r)];
        const Eigen::VectorXd& theta_b = nuclear.at(ref_b.surface).levels[ref_b.level].theta.values;
        const RowMatrix& psi_b = field.psi[ref_b.surface];
        for (Eigen::Index c = 0; c < count; ++c) {
            const auto& ref_a = levels[static_cast<std::size_t>(c)];
            const Eigen::VectorXd& theta_a = nuclear.at(ref_a.surface).levels[ref_a.level].theta.values;
            const RowMatrix& psi_a = field.psi[ref_a.surface];
            double t_theta = 0.0, t_cross = 0.0, t_psi = 0.0;
            for (Eigen::Index i = 0; i < n1; ++i) {
                const double same = h2 * psi_b.row(i).dot(psi_a.row(i));
                const double up = i + 1 < n1 ? h2 * psi_b.row(i).dot(psi_a.row(i + 1)) : 0.0;
                const double down = i > 0 ? h2 * psi_b.row(i).dot(psi_a.row(i - 1)) : 0.0;
                const double th = theta_a[i];
                const double th_up = theta_at(theta_a, i + 1);
                const double th_down = theta_at(theta_a, i - 1);
                const double weight = h1 * theta_b[i];
                t_theta += weight * (th_up - 2.0 * th + th_down) * inv_h2 * same;
                t_psi += weight * th * (up - 2.0 * same + down) * inv_h2;
                t_cross += weight * ((th_up - th) * (up - same) + (th_down - th) * (down - same)) * inv_h2;
            }
            out.theta_term(r, c) = prefactor * t_theta;
            out.cross_term(r, c) = prefactor * t_cross;
            out.psi_term(r, c) = prefactor * t_psi;
        }
    }
    out.matrix = out.theta_term + out.cross_term + out.psi_term;
    out.asymmetry = (out.matrix - out.matrix.transpose()).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < count; ++r) {
        for (Eigen::Index c = 0; c < count; ++c) {
            if (r != c) out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(out.matrix(r, c)));
        }
    }
    return out;
}

}  // namespace bolab
