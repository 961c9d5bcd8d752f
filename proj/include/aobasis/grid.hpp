#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "aobasis/error.hpp"

namespace aobasis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Uniform grid on (-x_max, x_max) with homogeneous Dirichlet conditions:
// the two boundary nodes are excluded, so x_j = -x_max + j*dx for
// j = 1..n_points and dx = 2*x_max/(n_points+1).
class Grid {
public:
    Grid(double x_max, int n_points) : x_max_(x_max), n_points_(n_points) {
        if (!(x_max > 0.0) || !std::isfinite(x_max))
            throw InvalidArgument("grid: x_max must be positive, got " + std::to_string(x_max));
        if (n_points < 3)
            throw InvalidArgument("grid: need at least 3 points, got " + std::to_string(n_points));
        dx_ = 2.0 * x_max / (n_points + 1);
        points_.resize(n_points);
        for (int j = 0; j < n_points; ++j) points_[j] = -x_max + (j + 1) * dx_;
    }

    double x_max() const noexcept { return x_max_; }
    int size() const noexcept { return n_points_; }
    double dx() const noexcept { return dx_; }
    const Vector& points() const noexcept { return points_; }
    double operator[](int j) const { return points_[j]; }

    bool operator==(const Grid& other) const noexcept {
        return x_max_ == other.x_max_ && n_points_ == other.n_points_;
    }

private:
    double x_max_;
    int n_points_;
    double dx_;
    Vector points_;
};

inline Grid build_grid(double x_max, int n_points) { return Grid(x_max, n_points); }

// Box half-width for a set of configurations: largest well position plus
// the radius past which atomic densities vanish in double precision.
inline double default_x_max(double a_max, double r_max = 15.0) { return a_max + r_max; }

// Double well with minima at -a and +a.
inline double potential(double a, double x) {
    // (x - a)^2 (x + a)^2 written so that V(a, x) == V(a, -x) exactly
    const double q = x * x - a * a;
    return q * q / (8.0 * a * a + 4.0);
}

// Symmetric tridiagonal matrix in banded storage. Only one off-diagonal
// is kept, so symmetry holds bit-for-bit.
class SymTridiagonal {
public:
    SymTridiagonal() = default;
    SymTridiagonal(Vector diag, Vector off) : diag_(std::move(diag)), off_(std::move(off)) {
        if (diag_.size() < 1 || off_.size() != diag_.size() - 1)
            throw InvalidArgument("tridiagonal: off-diagonal must have n-1 entries");
    }

    int size() const noexcept { return static_cast<int>(diag_.size()); }
    const Vector& diagonal() const noexcept { return diag_; }
    const Vector& off_diagonal() const noexcept { return off_; }

    double operator()(int i, int j) const {
        if (i == j) return diag_[i];
        if (i - j == 1) return off_[j];
        if (j - i == 1) return off_[i];
        return 0.0;
    }

    template <typename Derived>
    Matrix apply(const Eigen::MatrixBase<Derived>& v) const {
        const int n = size();
        Matrix out(v.rows(), v.cols());
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            for (int i = 0; i < n; ++i) {
                double s = diag_[i] * v(i, c);
                if (i > 0) s += off_[i - 1] * v(i - 1, c);
                if (i + 1 < n) s += off_[i] * v(i + 1, c);
                out(i, c) = s;
            }
        }
        return out;
    }

    // Dense copy, for oracle tests only.
    Matrix to_dense() const {
        const int n = size();
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = diag_[i];
            if (i + 1 < n) {
                m(i, i + 1) = off_[i];
                m(i + 1, i) = off_[i];
            }
        }
        return m;
    }

private:
    Vector diag_;
    Vector off_;
};

// 3-point discretisation of -1/2 d^2/dx^2 + V_a.
inline SymTridiagonal fd_hamiltonian(const Grid& grid, double a) {
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    Vector diag(grid.size());
    for (int j = 0; j < grid.size(); ++j) diag[j] = inv_dx2 + potential(a, grid[j]);
    Vector off = Vector::Constant(grid.size() - 1, -0.5 * inv_dx2);
    return {std::move(diag), std::move(off)};
}

// Discrete H^1 metric I - Laplacian.
inline SymTridiagonal h1_metric(const Grid& grid) {
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    Vector diag = Vector::Constant(grid.size(), 1.0 + 2.0 * inv_dx2);
    Vector off = Vector::Constant(grid.size() - 1, -inv_dx2);
    return {std::move(diag), std::move(off)};
}

// -1/2 d^2/dx^2 + x^2/2 on the same stencil; reference operator for the
// Hermite functions.
inline SymTridiagonal fd_harmonic_oscillator(const Grid& grid, double center = 0.0) {
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    Vector diag(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double y = grid[j] - center;
        diag[j] = inv_dx2 + 0.5 * y * y;
    }
    Vector off = Vector::Constant(grid.size() - 1, -0.5 * inv_dx2);
    return {std::move(diag), std::move(off)};
}

}  // namespace aobasis
