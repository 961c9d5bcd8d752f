#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "aobasis/criteria.hpp"
#include "aobasis/galerkin.hpp"
#include "aobasis/hermite.hpp"
#include "aobasis/reference.hpp"

namespace aobasis {

inline std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = count > 1 ? lo + (hi - lo) * i / (count - 1) : lo;
    return out;
}

struct CurvePoint {
    double a = 0.0;
    double e_ref = 0.0;
    double e_basis = std::numeric_limits<double>::quiet_NaN();
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    double condition = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string failure;  // set when the reduced solve failed at this point
};

// Dissociation curve of the basis R against the FD reference. Overcomplete
// points are recorded, not fatal.
inline std::vector<CurvePoint> energy_curve(const Matrix& r, const std::vector<double>& a_values, const Grid& grid,
                                            int n_funcs, double cond_limit = kDefaultCondLimit) {
    std::vector<CurvePoint> out;
    out.reserve(a_values.size());
    for (double a : a_values) {
        const OfflineConfigData cfg = build_offline_config(grid, a, n_funcs, Metric::L2);
        CurvePoint p;
        p.a = a;
        p.e_ref = cfg.e_ref();
        try {
            const ReducedGroundPair rgp = reduced_ground_pair(cfg.m_e, cfg.s_b, r, cond_limit);
            p.e_basis = rgp.energy();
            p.abs_error = std::abs(p.e_ref - p.e_basis);
            p.condition = rgp.condition;
            p.ok = true;
        } catch (const OvercompletenessFailure& e) {
            p.condition = e.condition();
            p.failure = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct DensityError {
    double a = 0.0;
    double l1 = 0.0;
    double h1 = 0.0;
    double vw = 0.0;  // || d/dx sqrt(rho) - d/dx sqrt(rho_ref) ||_{L^2}
};

// Central differences inside, one-sided at the two ends.
inline Vector grid_derivative(const Vector& f, double dx) {
    const auto n = f.size();
    Vector d(n);
    if (n < 2) return Vector::Zero(n);
    d[0] = (f[1] - f[0]) / dx;
    d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
    for (Eigen::Index j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * dx);
    return d;
}

inline DensityError density_errors(const Vector& rho_ref, const Vector& rho, const Grid& grid) {
    const double dx = grid.dx();
    const Vector diff = rho - rho_ref;
    const Vector d_diff = grid_derivative(diff, dx);
    const Vector sqrt_diff = rho.cwiseMax(0.0).cwiseSqrt() - rho_ref.cwiseMax(0.0).cwiseSqrt();
    const Vector d_sqrt = grid_derivative(sqrt_diff, dx);
    DensityError e;
    e.l1 = dx * diff.cwiseAbs().sum();
    e.h1 = std::sqrt(dx * diff.squaredNorm() + dx * d_diff.squaredNorm());
    e.vw = std::sqrt(dx * d_sqrt.squaredNorm());
    return e;
}

struct DensityComparison {
    Vector rho_ref;
    Vector rho;
    DensityError error;
};

inline DensityComparison compare_density(const Matrix& r, double a, const Grid& grid, int n_funcs,
                                         double cond_limit = kDefaultCondLimit) {
    const OfflineConfigData cfg = build_offline_config(grid, a, n_funcs, Metric::L2);
    const ReducedGroundPair rgp = reduced_ground_pair(cfg.m_e, cfg.s_b, r, cond_limit);
    const DimerBasis dimer = assemble_dimer(grid, a, n_funcs);
    DensityComparison out;
    out.rho_ref = solve_ground_pair(grid, a).density();
    out.rho = lcao_density(dimer.columns, expand(r), rgp.c, grid);
    out.error = density_errors(out.rho_ref, out.rho, grid);
    out.error.a = a;
    return out;
}

inline DensityError density_error(const Matrix& r, double a, const Grid& grid, int n_funcs,
                                  double cond_limit = kDefaultCondLimit) {
    return compare_density(r, a, grid, n_funcs, cond_limit).error;
}

struct ConditionPoint {
    double a;
    double condition;
};

// Condition number of the HBS overlap [[I, Sigma_a], [Sigma_a^T, I]] with
// N_b functions per centre, by quadrature on `grid`. Taken from the singular
// values of B rather than the eigenvalues of B^T B, which resolves condition
// numbers far beyond 1/eps.
inline std::vector<ConditionPoint> overlap_condition_sweep(int n_basis, const std::vector<double>& a_values,
                                                           const Grid& grid = Grid(20.0, 1999)) {
    std::vector<ConditionPoint> out;
    out.reserve(a_values.size());
    for (double a : a_values) {
        const Matrix b = assemble_dimer(grid, a, n_basis).columns;
        const Eigen::JacobiSVD<Matrix> svd(b);
        const Vector& sv = svd.singularValues();
        const double ratio = sv[0] / sv[sv.size() - 1];
        out.push_back({a, sv[sv.size() - 1] > 0.0 ? ratio * ratio : std::numeric_limits<double>::infinity()});
    }
    return out;
}

}  // namespace aobasis
