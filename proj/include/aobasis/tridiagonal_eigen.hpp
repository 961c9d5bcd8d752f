#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "aobasis/error.hpp"
#include "aobasis/grid.hpp"

namespace aobasis {

// Lowest eigenpairs of a symmetric tridiagonal matrix: Sturm-sequence
// bisection for the eigenvalues, then block inverse iteration with a
// shift below the spectrum and a Rayleigh-Ritz step on the block. The
// block handles (near-)degenerate clusters: any orthonormal basis of the
// invariant subspace is accepted.
struct Eigenpairs {
    Vector values;    // ascending
    Matrix vectors;   // unit Euclidean norm columns
    double max_residual = 0.0;  // max_i ||T v_i - lambda_i v_i||
    int iterations = 0;
};

namespace detail {

// Number of eigenvalues strictly below x.
inline int sturm_count(const SymTridiagonal& t, double x) {
    const auto& d = t.diagonal();
    const auto& e = t.off_diagonal();
    const double tiny = std::numeric_limits<double>::min();
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < t.size(); ++i) {
        if (std::abs(q) < tiny) q = -tiny;
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::pair<double, double> gershgorin(const SymTridiagonal& t) {
    const auto& d = t.diagonal();
    const auto& e = t.off_diagonal();
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    const int n = t.size();
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(e[i - 1]);
        if (i + 1 < n) r += std::abs(e[i]);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    return {lo, hi};
}

// k-th smallest eigenvalue (0-based) by bisection.
inline double bisect_eigenvalue(const SymTridiagonal& t, int k, double lo, double hi) {
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * scale;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// In-place solve of (T - shift I) X = B for SPD T - shift I (LDL^T, no pivoting).
inline void shifted_solve(const SymTridiagonal& t, double shift, Matrix& b) {
    const auto& d = t.diagonal();
    const auto& e = t.off_diagonal();
    const int n = t.size();
    Vector piv(n);
    Vector mult(std::max(n - 1, 0));
    piv[0] = d[0] - shift;
    for (int i = 1; i < n; ++i) {
        mult[i - 1] = e[i - 1] / piv[i - 1];
        piv[i] = d[i] - shift - mult[i - 1] * e[i - 1];
    }
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        for (int i = 1; i < n; ++i) b(i, c) -= mult[i - 1] * b(i - 1, c);
        for (int i = 0; i < n; ++i) b(i, c) /= piv[i];
        for (int i = n - 2; i >= 0; --i) b(i, c) -= mult[i] * b(i + 1, c);
    }
}

}  // namespace detail

inline Eigenpairs lowest_eigenpairs(const SymTridiagonal& t, int count, double residual_tol = 1e-10,
                                    int max_iter = 500) {
    const int n = t.size();
    if (count < 1 || count >= n)
        throw InvalidArgument("lowest_eigenpairs: count must lie in [1, n)");

    auto [lo, hi] = detail::gershgorin(t);
    // One extra eigenvalue sets the shift and the convergence rate.
    Vector lambda(count + 1);
    for (int k = 0; k <= count; ++k) lambda[k] = detail::bisect_eigenvalue(t, k, lo, hi);

    const double spread = std::max(lambda[count] - lambda[0], std::abs(lambda[0]) * 1e-8);
    const double shift = lambda[0] - 1e-3 * spread;

    // Deterministic start block: alternating even/odd profiles.
    Matrix v(n, count);
    for (int i = 0; i < n; ++i) {
        const double s = -1.0 + 2.0 * (i + 1) / (n + 1);
        for (int c = 0; c < count; ++c) v(i, c) = std::pow(s, c) * (1.0 - s * s) + 1e-3 * std::cos(7.0 * (c + 1) * s);
    }

    Eigenpairs out;
    const double tnorm = std::max(std::abs(lo), std::abs(hi));
    for (int it = 1; it <= max_iter; ++it) {
        detail::shifted_solve(t, shift, v);
        Eigen::HouseholderQR<Matrix> qr(v);
        v = qr.householderQ() * Matrix::Identity(n, count);

        const Matrix tv = t.apply(v);
        Matrix small = v.transpose() * tv;
        small = 0.5 * (small + small.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(small);
        v = v * es.eigenvectors();
        const Matrix tvr = tv * es.eigenvectors();

        double res = 0.0;
        for (int c = 0; c < count; ++c)
            res = std::max(res, (tvr.col(c) - es.eigenvalues()[c] * v.col(c)).norm());
        out.values = es.eigenvalues();
        out.max_residual = res;
        out.iterations = it;
        if (res <= residual_tol * std::max(1.0, tnorm * 1e-3)) {
            out.vectors = std::move(v);
            return out;
        }
    }
    std::ostringstream msg;
    msg << "lowest_eigenpairs: inverse iteration did not converge after " << max_iter
        << " iterations (residual " << out.max_residual << ", lambda0 " << lambda[0] << ")";
    throw NumericalFailure(msg.str());
}

}  // namespace aobasis
