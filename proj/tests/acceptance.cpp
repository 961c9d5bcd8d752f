// Acceptance checks: one PASS/FAIL line per criterion.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "aobasis/aobasis.hpp"
#include "oracles.hpp"

using namespace aobasis;

namespace {

// Reference setting.
constexpr double kXMax = 20.0;
constexpr int kNPoints = 1999;
constexpr int kNFuncs = 10;

// Published rows, N_b = 1..4.
constexpr std::array<double, 4> kHbsL2 = {-7.40829, -7.70051, -7.74312, -7.77138};
constexpr std::array<double, 4> kHbsH1 = {-10.5613, -11.0566, -11.1451, -11.2402};
constexpr std::array<double, 4> kHbsE = {3.77956e-2, 3.98301e-3, 1.86537e-3, 1.35309e-4};
constexpr double kTolL2Abs = 1e-3;
constexpr double kTolERel = 0.02;
constexpr double kTolH1Abs = 5e-3;

// Optimised targets for N_b = 2, 3. Energies: twice the published value.
// Projection criteria: published value cut to three decimals.
constexpr std::array<double, 2> kObsL2Bound = {-7.764, -7.777};
constexpr std::array<double, 2> kObsH1Bound = {-11.234, -11.263};
constexpr std::array<double, 2> kObsEBound = {2 * 1.92087e-4, 2 * 6.93394e-7};

constexpr double kGradRelTol = 1e-6;
constexpr double kGradStep = 1e-5;
constexpr int kGradSamples = 10;

constexpr double kProjectorRelTol = 1e-9;
constexpr double kRitzAbsTol = 1e-10;
constexpr int kOraclePairs = 5;

constexpr double kSeparatedA = 7.0;
constexpr double kSeparatedXMax = 22.0;
constexpr int kSeparatedNPoints = 2199;
constexpr double kSeparatedTol = 2e-3;
constexpr double kDensityTol = 1e-8;
constexpr double kVariationalSlack = 1e-10;

constexpr int kCondNb = 4;
constexpr double kCondRatio = 1e4;

constexpr double kSmallBasisE = 9.74560e-6;
constexpr double kSmallBasisFactor = 3.0;
constexpr double kHbsRowTol = 1e-10;

constexpr double kSparseA = 1.925;
constexpr int kSparseNb = 3;
constexpr double kSparseGain = 100.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const Grid& grid() {
    static const Grid g(kXMax, kNPoints);
    return g;
}

const std::vector<OfflineConfigData>& offline(int n_funcs, Metric metric) {
    static std::map<std::pair<int, Metric>, std::vector<OfflineConfigData>> cache;
    const auto key = std::make_pair(n_funcs, metric);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_offline(grid(), default_measure(), n_funcs, metric)).first;
    return it->second;
}

void hbs_tables(Outcome& o) {
    for (int nb = 1; nb <= 4; ++nb) {
        const Matrix r = hbs_coefficients(kNFuncs, nb);
        const double jl = eval_ja(r, offline(kNFuncs, Metric::L2));
        const double je = eval_je(r, offline(kNFuncs, Metric::L2));
        o.detail << " Nb" << nb << ": JL2=" << fmt(jl) << " JE=" << fmt(je) << ";";
        o.require(std::abs(jl - kHbsL2[nb - 1]) <= kTolL2Abs, "JL2 Nb" + std::to_string(nb));
        o.require(std::abs(je - kHbsE[nb - 1]) <= kTolERel * kHbsE[nb - 1], "JE Nb" + std::to_string(nb));
    }
}

void hbs_h1(Outcome& o) {
    for (int nb = 1; nb <= 4; ++nb) {
        const double jh = eval_ja(hbs_coefficients(kNFuncs, nb), offline(kNFuncs, Metric::H1));
        o.detail << " Nb" << nb << ": JH1=" << fmt(jh) << ";";
        o.require(std::abs(jh - kHbsH1[nb - 1]) <= kTolH1Abs, "JH1 Nb" + std::to_string(nb));
    }
}

void optimized_values(Outcome& o) {
    const std::array<std::pair<CriterionKind, const std::array<double, 2>*>, 3> runs = {{
        {CriterionKind::JA_L2, &kObsL2Bound},
        {CriterionKind::JA_H1, &kObsH1Bound},
        {CriterionKind::JE, &kObsEBound},
    }};
    for (const auto& [kind, bounds] : runs) {
        for (int nb : {2, 3}) {
            const auto start = std::chrono::steady_clock::now();
            const OptimReport rep =
                optimize_criterion(kind, offline(kNFuncs, metric_for(kind)), hbs_coefficients(kNFuncs, nb));
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const double bound = (*bounds)[nb - 2];
            o.detail << " " << to_string(kind) << " Nb" << nb << "=" << fmt(rep.final_value()) << " (<= " << fmt(bound)
                     << ", " << rep.iterations << " it, " << fmt(secs) << " s);";
            o.require(rep.final_value() <= bound, std::string(to_string(kind)) + " Nb" + std::to_string(nb));
            o.require(secs < 300.0, "runtime");
            o.require(stiefel_defect(rep.r_opt) < 1e-10, "feasibility");
        }
    }
}

void gradients(Outcome& o) {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    int checked = 0;
    for (int n : {5, 10}) {
        for (int nb = 1; nb <= 4; ++nb) {
            for (CriterionKind kind : {CriterionKind::JA_L2, CriterionKind::JA_H1, CriterionKind::JE}) {
                const auto& data = offline(n, metric_for(kind));
                for (int k = 0; k < kGradSamples; ++k) {
                    const Matrix r = random_stiefel(n, nb, rng);
                    const Matrix g = evaluate_criterion(kind, r, data, true).gradient;
                    const Matrix fd = oracle::central_difference(
                        [&](const Matrix& x) { return evaluate_criterion(kind, x, data, false).value; }, r, kGradStep);
                    const double err = (g - fd).norm() / fd.norm();
                    worst = std::max(worst, err);
                    ++checked;
                }
            }
        }
    }
    o.detail << " " << checked << " points, worst relative error " << fmt(worst);
    o.require(worst < kGradRelTol, "gradient mismatch");
}

void oracle_equivalence(Outcome& o) {
    const Grid& g = grid();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ua(1.5, 5.0);
    std::uniform_int_distribution<int> unb(1, 4);
    const Matrix h1_dense = h1_metric(g).to_dense();
    double worst_proj = 0.0, worst_ritz = 0.0;
    for (int k = 0; k < kOraclePairs; ++k) {
        const double a = ua(rng);
        const int nb = unb(rng);
        const Matrix r = random_stiefel(kNFuncs, nb, rng);
        const GroundPair gp = solve_ground_pair(g, a);
        const Matrix b = assemble_dimer(g, a, kNFuncs).columns;
        const Matrix x = b * expand(r);
        Matrix phi(g.size(), 2);
        phi.col(0) = gp.phi1 * std::sqrt(g.dx());
        phi.col(1) = gp.phi2 * std::sqrt(g.dx());
        for (Metric metric : {Metric::L2, Metric::H1}) {
            const std::vector<OfflineConfigData> data{build_offline_config(g, a, kNFuncs, metric, 1.0)};
            const double compressed = eval_ja(r, data);
            const double dense = metric == Metric::L2
                                     ? oracle::dense_projector_ja(x, Matrix::Identity(g.size(), g.size()), phi)
                                     : oracle::dense_projector_ja(x, h1_dense, phi);
            worst_proj = std::max(worst_proj, std::abs(compressed - dense) / std::abs(dense));
        }
        const OfflineConfigData cfg = build_offline_config(g, a, kNFuncs, Metric::L2);
        const double reduced = reduced_ground_pair(cfg.m_e, cfg.s_b, r).energy();
        const double dense = oracle::rayleigh_ritz_pair(x, fd_hamiltonian(g, a).to_dense());
        worst_ritz = std::max(worst_ritz, std::abs(reduced - dense));
    }
    o.detail << " projector rel. error " << fmt(worst_proj) << ", Ritz abs. error " << fmt(worst_ritz);
    o.require(worst_proj < kProjectorRelTol, "projector");
    o.require(worst_ritz < kRitzAbsTol, "Rayleigh-Ritz");
}

void physics_limits(Outcome& o) {
    const double e7 = solve_ground_pair(Grid(kSeparatedXMax, kSeparatedNPoints), kSeparatedA).energy();
    o.detail << " E_ref(7)=" << fmt(e7) << ";";
    o.require(std::abs(e7 - 1.0) <= kSeparatedTol, "separated wells");

    const Grid& g = grid();
    const auto a_values = linspace(1.5, 5.0, 50);
    std::vector<Matrix> bases;
    for (int nb = 1; nb <= 4; ++nb) bases.push_back(hbs_coefficients(kNFuncs, nb));
    for (int nb : {2, 3})
        bases.push_back(optimize_criterion(CriterionKind::JE, offline(kNFuncs, Metric::L2),
                                           hbs_coefficients(kNFuncs, nb)).r_opt);
    double worst_density = 0.0, worst_violation = 0.0;
    int points = 0;
    for (double a : a_values) {
        const OfflineConfigData cfg = build_offline_config(g, a, kNFuncs, Metric::L2);
        const Matrix b = assemble_dimer(g, a, kNFuncs).columns;
        for (const Matrix& r : bases) {
            const ReducedGroundPair rgp = reduced_ground_pair(cfg.m_e, cfg.s_b, r);
            const Vector rho = lcao_density(b, expand(r), rgp.c, g);
            worst_density = std::max(worst_density, std::abs(g.dx() * rho.sum() - 2.0));
            worst_violation = std::max(worst_violation, cfg.e_ref() - rgp.energy());
            ++points;
        }
    }
    o.detail << " " << points << " curve points, worst |int rho - 2| " << fmt(worst_density)
             << ", max E_ref - E_basis " << fmt(worst_violation);
    o.require(worst_density <= kDensityTol, "density integral");
    o.require(worst_violation <= kVariationalSlack, "variational inequality");
}

void condition_sweep(Outcome& o) {
    const auto sweep = overlap_condition_sweep(kCondNb, linspace(0.1, 5.0, 50), grid());
    bool monotone = true;
    for (std::size_t k = 1; k < sweep.size(); ++k) monotone &= sweep[k].condition <= sweep[k - 1].condition;
    const double ratio = sweep.front().condition / sweep.back().condition;
    o.detail << " cond(0.1)=" << fmt(sweep.front().condition) << " cond(5)=" << fmt(sweep.back().condition)
             << " ratio " << fmt(ratio) << (monotone ? ", monotone" : ", not monotone");
    o.require(monotone, "monotone");
    o.require(ratio > kCondRatio, "ratio");
}

void small_basis(Outcome& o) {
    const int n = 5;
    for (int nb = 1; nb <= 4; ++nb) {
        const double e5 = eval_je(hbs_coefficients(n, nb), offline(n, Metric::L2));
        const double e10 = eval_je(hbs_coefficients(kNFuncs, nb), offline(kNFuncs, Metric::L2));
        o.require(std::abs(e5 - e10) <= kHbsRowTol * e10, "HBS row Nb" + std::to_string(nb));
    }
    const OptimReport rep = optimize_criterion(CriterionKind::JE, offline(n, Metric::L2), hbs_coefficients(n, 4));
    const double ratio = rep.final_value() / kSmallBasisE;
    o.detail << " HBS row unchanged; E-OBS Nb4 = " << fmt(rep.final_value()) << " (" << rep.iterations
             << " it), ratio to published " << fmt(ratio);
    o.require(ratio <= kSmallBasisFactor && ratio >= 1.0 / kSmallBasisFactor, "N = 5 E-OBS");
}

void sparse_sampling(Outcome& o) {
    // Every criterion is trained at the single point; the check asks whether
    // any of them carries over to the whole curve.
    const Grid& g = grid();
    const Matrix r0 = hbs_coefficients(kNFuncs, kSparseNb);
    const double hbs = eval_je(r0, offline(kNFuncs, Metric::L2));
    double best = 0.0;
    o.detail << " a=" << kSparseA << ", curve JE of HBS " << fmt(hbs) << ";";
    for (CriterionKind kind : {CriterionKind::JA_L2, CriterionKind::JA_H1, CriterionKind::JE}) {
        const auto train = build_offline(g, single_point_measure(kSparseA), kNFuncs, metric_for(kind));
        const OptimReport rep = optimize_criterion(kind, train, r0);
        const double obs = eval_je(rep.r_opt, offline(kNFuncs, Metric::L2));
        best = std::max(best, hbs / obs);
        o.detail << " " << to_string(kind) << ": " << fmt(obs) << " (gain " << fmt(hbs / obs) << ", " << rep.iterations
                 << " it);";
    }
    o.require(best >= kSparseGain, "gain below " + fmt(kSparseGain));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"HBS J_L2 and J_E tables", hbs_tables},
        {"HBS J_H1 table", hbs_h1},
        {"optimised values N_b = 2, 3", optimized_values},
        {"gradient finite-difference check", gradients},
        {"oracle equivalence", oracle_equivalence},
        {"physics limits", physics_limits},
        {"overlap condition sweep", condition_sweep},
        {"N = 5 cross-check", small_basis},
        {"single training point", sparse_sampling},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << criteria[i].first << " --"
                  << o.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
