#include <catch_amalgamated.hpp>

#include "aobasis/stiefel.hpp"
#include "oracles.hpp"

using namespace aobasis;
using Catch::Approx;

namespace {

Matrix gaussian(int n, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Matrix m(n, k);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    return m;
}

}  // namespace

TEST_CASE("tangent projection", "[stiefel]") {
    std::mt19937_64 rng(1);
    const Matrix r = oracle::random_orthonormal(7, 3, rng);
    const Matrix g = gaussian(7, 3, rng);
    const Matrix t = tangent_project(r, g);
    const Matrix rt = r.transpose() * t;
    CHECK((rt + rt.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((tangent_project(r, t) - t).cwiseAbs().maxCoeff() < 1e-13);
    // Orthogonal projector in the Frobenius inner product.
    const Matrix h = gaussian(7, 3, rng);
    CHECK((tangent_project(r, h).array() * g.array()).sum() ==
          Approx((h.array() * tangent_project(r, g).array()).sum()).epsilon(1e-12));
}

TEST_CASE("QR retraction", "[stiefel]") {
    std::mt19937_64 rng(2);
    const Matrix r = oracle::random_orthonormal(9, 4, rng);
    CHECK((retract(r, Matrix::Zero(9, 4)) - r).cwiseAbs().maxCoeff() < 1e-13);

    const Matrix xi = tangent_project(r, gaussian(9, 4, rng));
    for (double t : {1.0, 0.1, 1e-3}) CHECK(stiefel_defect(retract(r, t * xi)) < 1e-13);

    // First-order agreement with R + t xi.
    auto dev = [&](double t) { return (retract(r, t * xi) - (r + t * xi)).norm(); };
    const double ratio = dev(1e-2) / dev(5e-3);
    CHECK(ratio == Approx(4.0).epsilon(0.05));
    CHECK(dev(1e-3) < 1e-5 * xi.squaredNorm() * 10.0);

    CHECK_THROWS_AS(retract(r, -r), RetractionFailure);
}

TEST_CASE("random Stiefel points are feasible and seeded", "[stiefel]") {
    std::mt19937_64 a(42), b(42);
    const Matrix ra = random_stiefel(10, 3, a);
    const Matrix rb = random_stiefel(10, 3, b);
    CHECK(stiefel_defect(ra) < 1e-13);
    CHECK((ra - rb).norm() == 0.0);
}

TEST_CASE("L-BFGS solves a Rayleigh-Ritz problem", "[stiefel][optim]") {
    std::mt19937_64 rng(3);
    const Matrix m = oracle::random_spd(8, rng);
    const Vector ev = oracle::dense_eigenvalues(m);
    auto f = [&](const Matrix& r) {
        return std::pair<double, Matrix>((r.transpose() * m * r).trace(), 2.0 * m * r);
    };
    for (int trial = 0; trial < 3; ++trial) {
        const Matrix r0 = random_stiefel(8, 2, rng);
        const OptimReport rep = minimize(f, r0);
        CHECK(rep.converged);
        CHECK(rep.status == "converged");
        CHECK(rep.final_value() == Approx(ev[0] + ev[1]).margin(1e-8));
        CHECK(stiefel_defect(rep.r_opt) < 1e-12);
        CHECK(rep.grad_norm <= 1e-7);
        CHECK(rep.trajectory.size() == static_cast<std::size_t>(rep.iterations + 1));
        for (std::size_t k = 1; k < rep.trajectory.size(); ++k)
            REQUIRE(rep.trajectory[k] <= rep.trajectory[k - 1] + 1e-14 * std::abs(rep.trajectory[k - 1]));
    }
}

TEST_CASE("iteration cap is reported", "[stiefel][optim]") {
    std::mt19937_64 rng(4);
    const Matrix m = oracle::random_spd(8, rng);
    auto f = [&](const Matrix& r) {
        return std::pair<double, Matrix>((r.transpose() * m * r).trace(), 2.0 * m * r);
    };
    OptimSettings s;
    s.max_iter = 2;
    const OptimReport rep = minimize(f, random_stiefel(8, 2, rng), s);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 2);
    CHECK(rep.status == "maximum number of iterations reached");
}

TEST_CASE("optimizer input checks", "[stiefel][optim]") {
    auto f = [](const Matrix& r) { return std::pair<double, Matrix>(r.squaredNorm(), 2.0 * r); };
    CHECK_THROWS_AS(minimize(f, Matrix::Ones(4, 2)), InvalidArgument);
    OptimSettings s;
    s.grad_tol = 0.0;
    CHECK_THROWS_AS(minimize(f, Matrix::Identity(4, 2), s), InvalidArgument);
}
