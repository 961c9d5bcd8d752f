#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aobasis/grid.hpp"
#include "aobasis/hermite.hpp"
#include "aobasis/tridiagonal_eigen.hpp"

namespace aobasis {

// Two lowest eigenpairs of the FD Hamiltonian, normalised as
// dx * phi_i^T phi_j = delta_ij.
struct GroundPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Vector phi1;
    Vector phi2;
    double max_residual = 0.0;

    double energy() const { return lambda1 + lambda2; }
    // Grid values of the reference density phi1^2 + phi2^2.
    Vector density() const { return phi1.array().square() + phi2.array().square(); }
};

inline GroundPair solve_ground_pair(const SymTridiagonal& hamiltonian, const Grid& grid) {
    if (hamiltonian.size() != grid.size())
        throw InvalidArgument("solve_ground_pair: operator and grid sizes differ");
    const Eigenpairs ep = lowest_eigenpairs(hamiltonian, 2);
    const double inv_sqrt_dx = 1.0 / std::sqrt(grid.dx());
    GroundPair gp;
    gp.lambda1 = ep.values[0];
    gp.lambda2 = ep.values[1];
    gp.phi1 = ep.vectors.col(0) * inv_sqrt_dx;
    gp.phi2 = ep.vectors.col(1) * inv_sqrt_dx;
    gp.max_residual = ep.max_residual;
    return gp;
}

inline GroundPair solve_ground_pair(const Grid& grid, double a) {
    return solve_ground_pair(fd_hamiltonian(grid, a), grid);
}

// Finite weighted sum of Dirac masses over configurations.
//
// Weights are normalised (sum 1). `mass` is the total mass the criteria
// integrate against; the default training measure uses mass = n * da so
// that each support point carries its spacing da, i.e. a Riemann sum over
// the training interval.
struct Measure {
    struct Point {
        double a;
        double w;
    };
    std::vector<Point> points;
    double mass = 1.0;

    std::size_t size() const noexcept { return points.size(); }

    void validate() const {
        if (points.empty()) throw InvalidArgument("measure: no support points");
        if (!(mass > 0.0)) throw InvalidArgument("measure: mass must be positive");
        double sum = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i].w > 0.0)) throw InvalidArgument("measure: weights must be positive");
            if (!(points[i].a >= 0.0)) throw InvalidArgument("measure: configurations must be non-negative");
            if (i > 0 && !(points[i].a > points[i - 1].a))
                throw InvalidArgument("measure: configurations must be strictly increasing");
            sum += points[i].w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("measure: weights must sum to 1");
    }

    double a_max() const { return points.back().a; }
};

// count equispaced points on [a_min, a_max] with equal weights and mass
// count * spacing (1 for a single point).
inline Measure uniform_measure(double a_min, double a_max, int count) {
    if (count < 1) throw InvalidArgument("uniform measure: count must be >= 1");
    if (count > 1 && !(a_max > a_min)) throw InvalidArgument("uniform measure: need a_min < a_max");
    Measure m;
    const double step = count > 1 ? (a_max - a_min) / (count - 1) : 0.0;
    for (int n = 0; n < count; ++n) m.points.push_back({a_min + n * step, 1.0 / count});
    m.mass = count > 1 ? count * step : 1.0;
    m.validate();
    return m;
}

inline Measure single_point_measure(double a) { return uniform_measure(a, a, 1); }

// Ten points on [1.5, 5] with spacing 3.5/9.
inline Measure default_measure() { return uniform_measure(1.5, 5.0, 10); }

enum class Metric { L2, H1 };

inline std::string_view to_string(Metric m) { return m == Metric::L2 ? "L2" : "H1"; }

inline Metric metric_from_string(std::string_view s) {
    if (s == "L2") return Metric::L2;
    if (s == "H1") return Metric::H1;
    throw InvalidArgument("unknown metric '" + std::string(s) + "' (expected L2 or H1)");
}

// R-independent matrices for one configuration. All products use the
// sqrt(dx)-scaled columns of B_a, so overlaps are plain matrix products.
struct OfflineConfigData {
    double a = 0.0;
    double weight = 0.0;  // mass * w_n
    int n_funcs = 0;
    Metric metric = Metric::L2;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Matrix m_a;    // (A B)^T P (A B)
    Matrix s_a_b;  // B^T A B
    Matrix m_e;    // B^T H B
    Matrix s_b;    // B^T B

    double e_ref() const { return lambda1 + lambda2; }
};

namespace detail {
inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }
}  // namespace detail

// Offline matrices of an arbitrary two-block basis b = [plus | minus]
// (sqrt(dx)-scaled columns) against a solved reference pair. The density
// matrix is applied in factored form G^T G with G = phi^T A b (2 x 2N).
inline OfflineConfigData offline_from_basis(const Grid& grid, double a, const Matrix& b, const GroundPair& gp,
                                            Metric metric, double weight = 1.0) {
    if (b.rows() != grid.size() || b.cols() % 2 != 0)
        throw InvalidArgument("offline_from_basis: basis must be n_points x 2N");
    const SymTridiagonal h = fd_hamiltonian(grid, a);
    Matrix phi(grid.size(), 2);
    const double sdx = std::sqrt(grid.dx());
    phi.col(0) = gp.phi1 * sdx;
    phi.col(1) = gp.phi2 * sdx;

    OfflineConfigData out;
    out.a = a;
    out.weight = weight;
    out.n_funcs = static_cast<int>(b.cols() / 2);
    out.metric = metric;
    out.lambda1 = gp.lambda1;
    out.lambda2 = gp.lambda2;

    const Matrix ab = metric == Metric::L2 ? b : h1_metric(grid).apply(b);
    const Matrix g = phi.transpose() * ab;
    out.m_a = detail::symmetrized(g.transpose() * g);
    out.s_a_b = detail::symmetrized(b.transpose() * ab);
    out.m_e = detail::symmetrized(b.transpose() * h.apply(b));
    out.s_b = detail::symmetrized(b.transpose() * b);
    return out;
}

// Offline matrices for one configuration of the Hermite dimer basis.
inline OfflineConfigData build_offline_config(const Grid& grid, double a, int n_funcs, Metric metric,
                                              double weight = 1.0) {
    if (!dimer_fits(grid, a, n_funcs)) {
        std::ostringstream msg;
        msg << "configuration a = " << a << " with " << n_funcs
            << " Hermite functions does not fit the grid (x_max = " << grid.x_max() << ")";
        throw InvalidArgument(msg.str());
    }
    GroundPair gp;
    try {
        gp = solve_ground_pair(grid, a);
    } catch (const NumericalFailure& e) {
        std::ostringstream msg;
        msg << "reference solve failed at a = " << a << ": " << e.what();
        throw NumericalFailure(msg.str());
    }
    return offline_from_basis(grid, a, assemble_dimer(grid, a, n_funcs).columns, gp, metric, weight);
}

inline std::vector<OfflineConfigData> build_offline(const Grid& grid, const Measure& measure, int n_funcs,
                                                    Metric metric) {
    measure.validate();
    std::vector<OfflineConfigData> out;
    out.reserve(measure.size());
    for (const auto& p : measure.points)
        out.push_back(build_offline_config(grid, p.a, n_funcs, metric, measure.mass * p.w));
    return out;
}

}  // namespace aobasis
