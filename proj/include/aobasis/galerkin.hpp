#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "aobasis/error.hpp"
#include "aobasis/grid.hpp"

namespace aobasis {

inline constexpr double kDefaultCondLimit = 1e12;

// R in St(N, N_b): coefficients of the N_b atomic orbitals in the first N
// Hermite functions. Plain Eigen matrix; feasibility is checked by callers.
using CoefficientMatrix = Matrix;

// First N_b columns of the N x N identity: the Hermite basis set itself.
inline CoefficientMatrix hbs_coefficients(int n_funcs, int n_basis) {
    if (n_basis < 1 || n_basis > n_funcs)
        throw InvalidArgument("hbs_coefficients: need 1 <= N_b <= N");
    return Matrix::Identity(n_funcs, n_basis);
}

// I_R = diag(R, R).
inline Matrix expand(const Matrix& r) {
    const auto n = r.rows();
    const auto nb = r.cols();
    Matrix out = Matrix::Zero(2 * n, 2 * nb);
    out.topLeftCorner(n, nb) = r;
    out.bottomRightCorner(n, nb) = r;
    return out;
}

// I_R^T S I_R, computed quadrant by quadrant.
inline Matrix reduced_overlap(const Matrix& s_block, const Matrix& r) {
    const auto n = r.rows();
    const auto nb = r.cols();
    if (s_block.rows() != 2 * n || s_block.cols() != 2 * n)
        throw InvalidArgument("reduced_overlap: block matrix must be 2N x 2N");
    Matrix out(2 * nb, 2 * nb);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block(i * nb, j * nb, nb, nb) = r.transpose() * s_block.block(i * n, j * n, n, n) * r;
    return 0.5 * (out + out.transpose());
}

struct InverseSqrt {
    Matrix value;
    double condition = 1.0;
    double min_eigenvalue = 1.0;
};

// Symmetric (Lowdin) inverse square root.
inline InverseSqrt inv_sqrt_spd(const Matrix& s, double cond_limit = kDefaultCondLimit) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) throw NumericalFailure("inv_sqrt_spd: eigendecomposition failed");
    const Vector& ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0) || cond > cond_limit) {
        std::ostringstream msg;
        msg << "overlap matrix is overcomplete: condition number " << cond << " (limit " << cond_limit
            << ", smallest eigenvalue " << lo << ")";
        throw OvercompletenessFailure(msg.str(), cond);
    }
    const Vector d = ev.array().rsqrt();
    return {es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose(), cond, lo};
}

inline double condition_number(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    return lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

// Lowest two eigenpairs of the reduced generalized problem
// (I_R^T M I_R) C = S C Lambda, C^T S C = I.
struct ReducedGroundPair {
    Matrix c;           // 2N_b x 2
    double mu1 = 0.0;
    double mu2 = 0.0;
    Vector ritz;        // every Ritz value, ascending
    double condition = 1.0;

    double energy() const { return mu1 + mu2; }
    // Distance from mu2 to the first unoccupied Ritz value (inf when N_b = 1).
    double gap() const {
        return ritz.size() > 2 ? ritz[2] - ritz[1] : std::numeric_limits<double>::infinity();
    }
};

inline ReducedGroundPair reduced_ground_pair(const Matrix& m_e, const Matrix& s_b, const Matrix& r,
                                             double cond_limit = kDefaultCondLimit) {
    const Matrix s = reduced_overlap(s_b, r);
    const InverseSqrt isq = inv_sqrt_spd(s, cond_limit);
    const Matrix h = reduced_overlap(m_e, r);
    Matrix t = isq.value * h * isq.value;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success) throw NumericalFailure("reduced_ground_pair: eigensolver failed");
    ReducedGroundPair out;
    out.c = isq.value * es.eigenvectors().leftCols(2);
    out.mu1 = es.eigenvalues()[0];
    out.mu2 = es.eigenvalues()[1];
    out.ritz = es.eigenvalues();
    out.condition = isq.condition;
    return out;
}

// Grid density (phi1^2 + phi2^2)/dx of the LCAO orbitals phi_i = B I_R C_i.
// B holds sqrt(dx)-scaled columns, hence the 1/dx.
inline Vector lcao_density(const Matrix& b, const Matrix& i_r, const Matrix& c, const Grid& grid) {
    const Matrix phi = b * (i_r * c);
    return phi.rowwise().squaredNorm() / grid.dx();
}

}  // namespace aobasis
