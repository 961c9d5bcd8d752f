#pragma once

#include <random>
#include <span>
#include <utility>

#include "aobasis/criteria.hpp"
#include "aobasis/stiefel.hpp"

namespace aobasis {

// Minimise one of the criteria over St(N, N_b) from r0.
inline OptimReport optimize_criterion(CriterionKind kind, std::span<const OfflineConfigData> offline,
                                      const Matrix& r0, const OptimSettings& settings = {},
                                      double cond_limit = kDefaultCondLimit) {
    auto objective = [&](const Matrix& r) {
        CriterionResult res = evaluate_criterion(kind, r, offline, true, cond_limit);
        return std::pair<double, Matrix>(res.value, std::move(res.gradient));
    };
    return minimize(objective, r0, settings);
}

// Starting point: the first N_b Hermite functions, or a random Stiefel
// matrix drawn from a seeded generator.
inline Matrix starting_point(int n_funcs, int n_basis, bool random, unsigned long long seed) {
    if (!random) return hbs_coefficients(n_funcs, n_basis);
    std::mt19937_64 rng(seed);
    return random_stiefel(n_funcs, n_basis, rng);
}

}  // namespace aobasis
