#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "aobasis/galerkin.hpp"
#include "aobasis/reference.hpp"

namespace aobasis {

enum class CriterionKind { JA_L2, JA_H1, JE };

inline std::string_view to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::JA_L2: return "JA_L2";
        case CriterionKind::JA_H1: return "JA_H1";
        case CriterionKind::JE: return "JE";
    }
    return "?";
}

inline CriterionKind criterion_from_string(std::string_view s) {
    if (s == "JA_L2") return CriterionKind::JA_L2;
    if (s == "JA_H1") return CriterionKind::JA_H1;
    if (s == "JE") return CriterionKind::JE;
    throw InvalidArgument("unknown criterion '" + std::string(s) + "' (expected JA_L2, JA_H1 or JE)");
}

// Metric the offline data must have been built with.
inline Metric metric_for(CriterionKind k) { return k == CriterionKind::JA_H1 ? Metric::H1 : Metric::L2; }

// Quadrants of a matrix made of two row blocks and two column blocks.
enum class Block { PlusPlus, PlusMinus, MinusPlus, MinusMinus };

template <typename Derived>
auto quadrant(Eigen::MatrixBase<Derived>& m, Block b) {
    const auto r = m.rows() / 2;
    const auto c = m.cols() / 2;
    const bool lower = b == Block::MinusPlus || b == Block::MinusMinus;
    const bool right = b == Block::PlusMinus || b == Block::MinusMinus;
    return m.block(lower ? r : 0, right ? c : 0, r, c);
}

template <typename Derived>
auto quadrant(const Eigen::MatrixBase<Derived>& m, Block b) {
    const auto r = m.rows() / 2;
    const auto c = m.cols() / 2;
    const bool lower = b == Block::MinusPlus || b == Block::MinusMinus;
    const bool right = b == Block::PlusMinus || b == Block::MinusMinus;
    return m.block(lower ? r : 0, right ? c : 0, r, c);
}

// F^{++} + F^{--}: the pairing Tr(I_H^T F) = <H, F^{++} + F^{--}>.
inline Matrix diagonal_block_sum(const Matrix& f) {
    return quadrant(f, Block::PlusPlus) + quadrant(f, Block::MinusMinus);
}

struct CriterionResult {
    double value = 0.0;
    Matrix gradient;  // Euclidean gradient, empty unless requested
    double max_condition = 1.0;
    double min_gap = std::numeric_limits<double>::infinity();
    bool degenerate_gap = false;
};

inline constexpr double kGapTolerance = 1e-10;

namespace detail {

inline void check_inputs(const Matrix& r, std::span<const OfflineConfigData> offline) {
    if (offline.empty()) throw InvalidArgument("criterion: no offline configurations");
    for (const auto& cfg : offline)
        if (cfg.n_funcs != r.rows())
            throw InvalidArgument("criterion: R has " + std::to_string(r.rows()) +
                                  " rows but offline data were built with N = " + std::to_string(cfg.n_funcs));
    if (r.cols() < 1 || r.cols() > r.rows()) throw InvalidArgument("criterion: need 1 <= N_b <= N");
}

struct SpdInverse {
    Matrix inverse;
    double condition;
};

inline SpdInverse spd_inverse(const Matrix& s, double cond_limit, double a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Vector& ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    const double cond = lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
    if (!(lo > 0.0) || cond > cond_limit) {
        throw OvercompletenessFailure("overlap matrix at a = " + std::to_string(a) + " with N_b = " +
                                          std::to_string(s.rows() / 2) +
                                          " is overcomplete (condition number " + std::to_string(cond) + ")",
                                      cond);
    }
    return {es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose(), cond};
}

}  // namespace detail

// J_A(R) = -sum_n w_n Tr(M_A(a_n) I_R [S^A(B I_R)]^{-1} I_R^T), and its gradient
// -2 sum_n w_n (M_A(a_n,R)^{++} + M_A(a_n,R)^{--}).
inline CriterionResult criterion_ja(const Matrix& r, std::span<const OfflineConfigData> offline, bool with_gradient,
                                    double cond_limit = kDefaultCondLimit) {
    detail::check_inputs(r, offline);
    const Matrix ir = expand(r);
    CriterionResult out;
    if (with_gradient) out.gradient = Matrix::Zero(r.rows(), r.cols());
    for (const auto& cfg : offline) {
        const Matrix s = reduced_overlap(cfg.s_a_b, r);
        const auto inv = detail::spd_inverse(s, cond_limit, cfg.a);
        out.max_condition = std::max(out.max_condition, inv.condition);
        const Matrix m_ir = cfg.m_a * ir;               // 2N x 2Nb
        const Matrix k = ir.transpose() * m_ir;          // I_R^T M I_R
        out.value -= cfg.weight * (k * inv.inverse).trace();
        if (with_gradient) {
            const Matrix m_ir_sinv = m_ir * inv.inverse;
            const Matrix f = m_ir_sinv - cfg.s_a_b * ir * inv.inverse * k * inv.inverse;
            out.gradient -= 2.0 * cfg.weight * diagonal_block_sum(f);
        }
    }
    return out;
}

inline double eval_ja(const Matrix& r, std::span<const OfflineConfigData> offline) {
    return criterion_ja(r, offline, false).value;
}

inline Matrix grad_ja(const Matrix& r, std::span<const OfflineConfigData> offline) {
    return criterion_ja(r, offline, true).gradient;
}

// J_E(R) = sum_n w_n |E_ref(a_n) - E_R(a_n)|^2. Gradient via
// grad E_a = 2 (M I_R P - S I_R Q)^{++} + 2 (M I_R P - S I_R Q)^{--}
// with P = C C^T and Q = C Lambda C^T (Euler-Lagrange term for the
// constraint C^T S C = I).
inline CriterionResult criterion_je(const Matrix& r, std::span<const OfflineConfigData> offline, bool with_gradient,
                                    double cond_limit = kDefaultCondLimit) {
    detail::check_inputs(r, offline);
    const Matrix ir = expand(r);
    CriterionResult out;
    if (with_gradient) out.gradient = Matrix::Zero(r.rows(), r.cols());
    for (const auto& cfg : offline) {
        ReducedGroundPair rgp;
        try {
            rgp = reduced_ground_pair(cfg.m_e, cfg.s_b, r, cond_limit);
        } catch (const OvercompletenessFailure& e) {
            throw OvercompletenessFailure("at a = " + std::to_string(cfg.a) + " with N_b = " +
                                              std::to_string(r.cols()) + ": " + e.what(),
                                          e.condition());
        }
        out.max_condition = std::max(out.max_condition, rgp.condition);
        out.min_gap = std::min(out.min_gap, rgp.gap());
        const double residual = cfg.e_ref() - rgp.energy();
        out.value += cfg.weight * residual * residual;
        if (with_gradient) {
            const Matrix p = rgp.c * rgp.c.transpose();
            const Vector lambda = Eigen::Vector2d(rgp.mu1, rgp.mu2);
            const Matrix q = rgp.c * lambda.asDiagonal() * rgp.c.transpose();
            const Matrix f = cfg.m_e * ir * p - cfg.s_b * ir * q;
            const Matrix grad_e = 2.0 * diagonal_block_sum(f);
            out.gradient -= 2.0 * cfg.weight * residual * grad_e;
        }
    }
    out.degenerate_gap = out.min_gap < kGapTolerance;
    return out;
}

inline double eval_je(const Matrix& r, std::span<const OfflineConfigData> offline) {
    return criterion_je(r, offline, false).value;
}

// Throws DegenerateGapFailure when the occupied pair touches the next Ritz value.
inline Matrix grad_je(const Matrix& r, std::span<const OfflineConfigData> offline) {
    auto res = criterion_je(r, offline, true);
    if (res.degenerate_gap)
        throw DegenerateGapFailure("grad_je: second and third Ritz values are degenerate", res.min_gap);
    return std::move(res.gradient);
}

inline CriterionResult evaluate_criterion(CriterionKind kind, const Matrix& r,
                                          std::span<const OfflineConfigData> offline, bool with_gradient,
                                          double cond_limit = kDefaultCondLimit) {
    if (kind == CriterionKind::JE) return criterion_je(r, offline, with_gradient, cond_limit);
    for (const auto& cfg : offline)
        if (cfg.metric != metric_for(kind))
            throw InvalidArgument("criterion " + std::string(to_string(kind)) +
                                  " needs offline data built with the " + std::string(to_string(metric_for(kind))) +
                                  " metric");
    return criterion_ja(r, offline, with_gradient, cond_limit);
}

}  // namespace aobasis
