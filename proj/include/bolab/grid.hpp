#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Core>

namespace bolab {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid of `n` interior points on (x_min, x_max). The end points
/// carry homogeneous Dirichlet conditions and are not stored.
struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;
    double h = 0.0;

    double point(std::size_t i) const { return x_min + static_cast<double>(i + 1) * h; }
    double length() const { return x_max - x_min; }
    Eigen::VectorXd points() const;

    friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

inline constexpr std::size_t kMinGridPoints = 8;

/// Spacing of `n` interior points between two Dirichlet walls.
inline double grid_spacing(double x_min, double x_max, std::size_t n) {
    return (x_max - x_min) / static_cast<double>(n + 1);
}

Grid1D build_grid(double x_min, double x_max, std::size_t n);

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
struct SymTridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;  // size diag.size() - 1

    std::size_t size() const { return static_cast<std::size_t>(diag.size()); }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd to_dense() const;
};

/// Central three-point stencil on `n` points of spacing `h`, Dirichlet closure.
SymTridiagonal second_derivative_stencil(std::size_t n, double h);
SymTridiagonal second_derivative_matrix(const Grid1D& grid);

template <class Scalar>
struct GridFunction {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Grid1D grid;
    Vector values;

    GridFunction() = default;
    GridFunction(Grid1D g, Vector v) : grid(g), values(std::move(v)) {
        if (static_cast<std::size_t>(values.size()) != grid.n) {
            throw std::invalid_argument("GridFunction: value count does not match grid");
        }
    }
};

using RealGridFunction = GridFunction<double>;
using ComplexGridFunction = GridFunction<std::complex<double>>;

/// h-weighted sum of conj(f) * g.
template <class A, class B>
std::complex<double> inner_product(const GridFunction<A>& f, const GridFunction<B>& g) {
    if (!(f.grid == g.grid)) {
        throw std::invalid_argument("inner_product: functions live on different grids");
    }
    std::complex<double> acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
        acc += std::conj(std::complex<double>(f.values[i])) * std::complex<double>(g.values[i]);
    }
    return acc * f.grid.h;
}

template <class Scalar>
double norm(const GridFunction<Scalar>& f) {
    return std::sqrt(f.values.squaredNorm() * f.grid.h);
}

/// Coefficients c_k of f_i = sum_k c_k sin(k pi (i+1) / (n+1)), k = 1..n.
/// This is the sine series of the band-limited function that vanishes on
/// both walls and interpolates the samples.
Eigen::VectorXd sine_coefficients(const Eigen::VectorXd& samples);

}  // namespace bolab
