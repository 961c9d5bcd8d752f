#pragma once

#include <cmath>
#include <concepts>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aobasis/error.hpp"
#include "aobasis/grid.hpp"

namespace aobasis {

// max |R^T R - I|
inline double stiefel_defect(const Matrix& r) {
    return (r.transpose() * r - Matrix::Identity(r.cols(), r.cols())).cwiseAbs().maxCoeff();
}

// Projection onto the tangent space of St(N, N_b) at R (embedded metric).
inline Matrix tangent_project(const Matrix& r, const Matrix& g) {
    const Matrix rtg = r.transpose() * g;
    return g - r * (0.5 * (rtg + rtg.transpose()));
}

// QR retraction, R-factor diagonal made positive so the map is unique.
inline Matrix retract(const Matrix& r, const Matrix& t) {
    const Matrix y = r + t;
    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
    const Matrix rf = qr.matrixQR().topRows(y.cols()).triangularView<Eigen::Upper>();
    const double scale = std::max(1.0, y.norm());
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
        const double d = rf(k, k);
        if (!(std::abs(d) > 1e-12 * scale)) throw RetractionFailure("retract: R + T is rank deficient");
        if (d < 0.0) q.col(k) = -q.col(k);
    }
    return q;
}

// Haar-like random point: Q factor of a Gaussian matrix.
template <typename Rng>
Matrix random_stiefel(int n, int nb, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, nb);
    for (int j = 0; j < nb; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = gauss(rng);
    return retract(Matrix::Zero(n, nb), g);
}

struct OptimSettings {
    double grad_tol = 1e-7;
    int max_iter = 500;
    int lbfgs_memory = 10;
    double armijo = 1e-4;
    double initial_step = 1.0;
    int max_backtracks = 60;

    void validate() const {
        if (!(grad_tol > 0.0)) throw InvalidArgument("optimizer: grad_tol must be positive");
        if (max_iter < 1) throw InvalidArgument("optimizer: max_iter must be >= 1");
        if (lbfgs_memory < 1) throw InvalidArgument("optimizer: lbfgs_memory must be >= 1");
    }
};

struct OptimReport {
    Matrix r_opt;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool stalled = false;
    std::vector<double> trajectory;  // criterion value after each accepted step (entry 0: start)
    double grad_norm = 0.0;          // Frobenius norm of the tangent gradient at r_opt
    std::string status;

    double final_value() const { return trajectory.back(); }
};

// Objective: R -> (value, Euclidean gradient).
template <typename F>
concept StiefelObjective = requires(F f, const Matrix& r) {
    { f(r) } -> std::convertible_to<std::pair<double, Matrix>>;
};

namespace detail {
inline double frob_dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }
}  // namespace detail

// Riemannian L-BFGS: two-loop recursion on tangent-projected gradients,
// stored pairs transported by projection onto the current tangent space,
// backtracking (Armijo) line search along the QR retraction.
template <StiefelObjective F>
OptimReport minimize(F&& objective, const Matrix& r0, const OptimSettings& settings = {}) {
    settings.validate();
    if (r0.cols() < 1 || r0.cols() > r0.rows()) throw InvalidArgument("minimize: need 1 <= N_b <= N");
    if (stiefel_defect(r0) > 1e-8) throw InvalidArgument("minimize: starting point is not on the Stiefel manifold");

    OptimReport rep;
    Matrix r = r0;
    auto [value, egrad] = objective(r);
    ++rep.evaluations;
    Matrix g = tangent_project(r, egrad);
    rep.trajectory.push_back(value);

    std::deque<std::pair<Matrix, Matrix>> memory;  // (s, y), newest last

    auto direction = [&]() -> Matrix {
        Matrix q = g;
        std::vector<double> alpha(memory.size());
        std::vector<double> rho(memory.size());
        for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
            rho[i] = 1.0 / detail::frob_dot(memory[i].second, memory[i].first);
            alpha[i] = rho[i] * detail::frob_dot(memory[i].first, q);
            q -= alpha[i] * memory[i].second;
        }
        double gamma = 1.0;
        if (!memory.empty()) {
            const auto& [s, y] = memory.back();
            gamma = detail::frob_dot(s, y) / detail::frob_dot(y, y);
        } else {
            gamma = 1.0 / std::max(1.0, g.norm());
        }
        q *= gamma;
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const double beta = rho[i] * detail::frob_dot(memory[i].second, q);
            q += (alpha[i] - beta) * memory[i].first;
        }
        return -tangent_project(r, q);
    };

    while (true) {
        rep.grad_norm = g.norm();
        if (rep.grad_norm <= settings.grad_tol) {
            rep.converged = true;
            rep.status = "converged";
            break;
        }
        if (rep.iterations >= settings.max_iter) {
            rep.status = "maximum number of iterations reached";
            break;
        }

        Matrix d = direction();
        double slope = detail::frob_dot(g, d);
        if (!(slope < 0.0)) {
            memory.clear();
            d = direction();
            slope = detail::frob_dot(g, d);
        }

        bool accepted = false;
        Matrix r_new;
        double value_new = 0.0;
        Matrix egrad_new;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double step = settings.initial_step;
            for (int k = 0; k < settings.max_backtracks; ++k, step *= 0.5) {
                try {
                    r_new = retract(r, step * d);
                    auto [v, eg] = objective(r_new);
                    ++rep.evaluations;
                    // Round-off allowance: near the optimum the predicted decrease
                    // drops below the resolution of the criterion value.
                    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
                    if (std::isfinite(v) && v <= value + settings.armijo * step * slope + noise) {
                        value_new = v;
                        egrad_new = std::move(eg);
                        accepted = true;
                        break;
                    }
                } catch (const NumericalFailure&) {
                    // Trial point outside the admissible region: shrink.
                }
            }
            if (!accepted && !memory.empty()) {
                memory.clear();
                d = direction();
                slope = detail::frob_dot(g, d);
            } else {
                break;
            }
        }
        if (!accepted) {
            rep.stalled = true;
            rep.status = "line search failed";
            break;
        }

        const Matrix g_new = tangent_project(r_new, egrad_new);
        Matrix s = tangent_project(r_new, r_new - r);
        Matrix y = g_new - tangent_project(r_new, g);
        for (auto& [ms, my] : memory) {
            ms = tangent_project(r_new, ms);
            my = tangent_project(r_new, my);
        }
        std::erase_if(memory, [](const auto& p) { return detail::frob_dot(p.first, p.second) <= 0.0; });
        if (detail::frob_dot(s, y) > 1e-14 * s.norm() * y.norm()) {
            memory.emplace_back(std::move(s), std::move(y));
            while (static_cast<int>(memory.size()) > settings.lbfgs_memory) memory.pop_front();
        }

        r = std::move(r_new);
        value = value_new;
        g = g_new;
        ++rep.iterations;
        rep.trajectory.push_back(value);
    }
    rep.r_opt = std::move(r);
    return rep;
}

}  // namespace aobasis
