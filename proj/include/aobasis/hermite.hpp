#pragma once

#include <cmath>
#include <iostream>
#include <numbers>
#include <span>
#include <vector>

#include "aobasis/grid.hpp"

namespace aobasis {

// Values h_0(y)..h_{n-1}(y) of the L^2-normalised Hermite functions,
// through the normalised three-term recurrence (no factorials, no overflow).
inline void hermite_functions(double y, std::span<double> out) {
    if (out.empty()) return;
    const double h0 = std::exp(-0.5 * y * y) / std::sqrt(std::sqrt(std::numbers::pi));
    out[0] = h0;
    if (out.size() > 1) out[1] = std::numbers::sqrt2 * y * h0;
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double kd = static_cast<double>(k);
        out[k + 1] = y * std::sqrt(2.0 / (kd + 1.0)) * out[k] - std::sqrt(kd / (kd + 1.0)) * out[k - 1];
    }
}

// Hermite functions centred at `center`, sampled on the grid and scaled by
// sqrt(dx) so that Euclidean products are L^2 quadratures.
struct SampledBasis {
    double center = 0.0;
    int n_funcs = 0;
    Matrix columns;  // n_points x n_funcs
};

inline SampledBasis hermite_columns(const Grid& grid, double center, int n_funcs) {
    if (n_funcs < 1) throw InvalidArgument("hermite_columns: n_funcs must be >= 1");
    if (!(std::abs(center) < grid.x_max()))
        throw InvalidArgument("hermite_columns: center outside the grid box");
    SampledBasis basis{center, n_funcs, Matrix(grid.size(), n_funcs)};
    const double scale = std::sqrt(grid.dx());
    std::vector<double> row(n_funcs);
    for (int j = 0; j < grid.size(); ++j) {
        hermite_functions(grid[j] - center, row);
        for (int n = 0; n < n_funcs; ++n) basis.columns(j, n) = scale * row[n];
    }
    return basis;
}

// h_{N-1} is negligible (below 1e-20) once 8 units past its classical
// turning point sqrt(2N - 1); the dimer fits when that point is inside the box.
inline bool dimer_fits(const Grid& grid, double a, int n_funcs) {
    return std::abs(a) + std::sqrt(2.0 * n_funcs - 1.0) + 8.0 <= grid.x_max();
}

// B_a = [ h_n(x - a) | h_n(x + a) ]: the +a block first.
struct DimerBasis {
    double a = 0.0;
    int n_funcs = 0;
    Matrix columns;  // n_points x 2*n_funcs

    auto plus_block() const { return columns.leftCols(n_funcs); }
    auto minus_block() const { return columns.rightCols(n_funcs); }
};

inline DimerBasis assemble_dimer(const Grid& grid, double a, int n_funcs) {
    if (!dimer_fits(grid, a, n_funcs)) {
        std::cerr << "warning: Hermite tails at a = " << a << " with " << n_funcs
                  << " functions exceed the grid box (x_max = " << grid.x_max() << ")\n";
    }
    DimerBasis b{a, n_funcs, Matrix(grid.size(), 2 * n_funcs)};
    b.columns.leftCols(n_funcs) = hermite_columns(grid, a, n_funcs).columns;
    b.columns.rightCols(n_funcs) = hermite_columns(grid, -a, n_funcs).columns;
    return b;
}

}  // namespace aobasis
