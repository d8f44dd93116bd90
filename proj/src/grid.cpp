#include "bolab/grid.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/core.h>

namespace bolab {

Eigen::VectorXd Grid1D::points() const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = point(i);
    return x;
}

Grid1D build_grid(double x_min, double x_max, std::size_t n) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw std::invalid_argument("build_grid: bounds must be finite");
    }
    if (!(x_min < x_max)) {
        throw std::invalid_argument(fmt::format("build_grid: x_min ({}) must be below x_max ({})", x_min, x_max));
    }
    if (n < kMinGridPoints) {
        throw std::invalid_argument(
            fmt::format("build_grid: need at least {} interior points, got {}", kMinGridPoints, n));
    }
    return Grid1D{x_min, x_max, n, grid_spacing(x_min, x_max, n)};
}

Eigen::VectorXd SymTridiagonal::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = diag.size();
    Eigen::VectorXd y = diag.cwiseProduct(x);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        y[i] += off[i] * x[i + 1];
        y[i + 1] += off[i] * x[i];
    }
    return y;
}

Eigen::MatrixXd SymTridiagonal::to_dense() const {
    const Eigen::Index n = diag.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = diag[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = off[i];
        a(i + 1, i) = off[i];
    }
    return a;
}

SymTridiagonal second_derivative_stencil(std::size_t n, double h) {
    if (n == 0 || !(h > 0.0)) throw std::invalid_argument("second_derivative_stencil: need n > 0, h > 0");
    const double inv_h2 = 1.0 / (h * h);
    const auto size = static_cast<Eigen::Index>(n);
    return SymTridiagonal{Eigen::VectorXd::Constant(size, -2.0 * inv_h2),
                          Eigen::VectorXd::Constant(size - 1, inv_h2)};
}

SymTridiagonal second_derivative_matrix(const Grid1D& grid) {
    return second_derivative_stencil(grid.n, grid.h);
}

Eigen::VectorXd sine_coefficients(const Eigen::VectorXd& samples) {
    const Eigen::Index n = samples.size();
    const Eigen::Index period = 2 * (n + 1);
    // sin(pi * k * (i+1) / (n+1)) only depends on k*(i+1) mod 2(n+1).
    std::vector<double> table(static_cast<std::size_t>(period));
    for (Eigen::Index q = 0; q < period; ++q) {
        table[static_cast<std::size_t>(q)] =
            std::sin(std::numbers::pi * static_cast<double>(q) / static_cast<double>(n + 1));
    }
    Eigen::VectorXd c(n);
    const double scale = 2.0 / static_cast<double>(n + 1);
    for (Eigen::Index k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += samples[i] * table[static_cast<std::size_t>((k * (i + 1)) % period)];
        }
        c[k - 1] = scale * acc;
    }
    return c;
}

}  // namespace bolab
