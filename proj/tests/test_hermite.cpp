#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "aobasis/hermite.hpp"
#include "oracles.hpp"

using namespace aobasis;
using Catch::Approx;

TEST_CASE("h0 at its centre", "[hermite]") {
    std::vector<double> v(1);
    hermite_functions(0.0, v);
    CHECK(v[0] == Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
}

TEST_CASE("recurrence agrees with the explicit polynomial", "[hermite]") {
    std::vector<double> v(16);
    for (double y : {-6.0, -2.5, -0.3, 0.0, 0.7, 1.9, 4.2, 7.0}) {
        hermite_functions(y, v);
        for (int n = 0; n < 16; ++n) {
            const double ref = oracle::hermite_function_explicit(n, y);
            const double scale = std::max(std::abs(ref), 1e-12);
            INFO("n = " << n << ", y = " << y);
            REQUIRE(std::abs(v[n] - ref) / scale < 1e-10);
        }
    }
}

TEST_CASE("sampled Hermite functions are orthonormal", "[hermite]") {
    const Grid g(20.0, 1999);
    for (double c : {0.0, 1.5, -5.0}) {
        const Matrix b = hermite_columns(g, c, 10).columns;
        CHECK((b.transpose() * b - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("sampled Hermite functions are near-eigenvectors of the FD oscillator", "[hermite]") {
    const double c = 1.5;
    auto residuals = [&](const Grid& g) {
        const Matrix b = hermite_columns(g, c, 10).columns;
        const Matrix hb = fd_harmonic_oscillator(g, c).apply(b);
        Vector r(10);
        for (int n = 0; n < 10; ++n) r[n] = (hb.col(n) - (n + 0.5) * b.col(n)).norm();
        return r;
    };
    const Vector coarse = residuals(Grid(20.0, 1999));  // dx = 0.02
    const Vector fine = residuals(Grid(20.0, 3999));    // dx = 0.01
    for (int n = 0; n < 10; ++n) {
        INFO("n = " << n);
        CHECK(fine[n] < 1e-3);
        // Truncation error of the 3-point stencil is O(dx^2).
        CHECK(coarse[n] / fine[n] == Approx(4.0).epsilon(0.02));
    }
}

TEST_CASE("dimer basis layout", "[hermite][dimer]") {
    const Grid g(20.0, 1999);
    const DimerBasis d = assemble_dimer(g, 0.0, 4);
    CHECK(d.columns.rows() == g.size());
    CHECK(d.columns.cols() == 8);
    CHECK((d.plus_block() - d.minus_block()).cwiseAbs().maxCoeff() == 0.0);

    const DimerBasis e = assemble_dimer(g, 2.0, 3);
    CHECK((e.plus_block() - hermite_columns(g, 2.0, 3).columns).cwiseAbs().maxCoeff() == 0.0);
    CHECK((e.minus_block() - hermite_columns(g, -2.0, 3).columns).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inter-centre overlap", "[hermite][dimer]") {
    const Grid g(20.0, 1999);
    SECTION("cross overlaps match the closed form") {
        for (double a : {0.1, 0.7, 2.0, 5.0}) {
            const DimerBasis d = assemble_dimer(g, a, 10);
            const Matrix sigma = d.plus_block().transpose() * d.minus_block();
            for (int m = 0; m < 10; ++m)
                for (int n = 0; n < 10; ++n)
                    REQUIRE(sigma(m, n) == Approx(oracle::displaced_hermite_overlap(m, n, -2.0 * a)).margin(1e-12));
        }
    }
    SECTION("far apart the centres decouple") {
        // h_9 still reaches across a distance of 10, so only the low block is tiny.
        const DimerBasis d = assemble_dimer(g, 5.0, 10);
        const Matrix sigma = d.plus_block().transpose() * d.minus_block();
        CHECK(sigma.topLeftCorner(4, 4).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(sigma.cwiseAbs().maxCoeff() < 2e-2);
    }
    SECTION("close centres nearly coincide") {
        // First order in the shift 2a: off-diagonal entries near 2a sqrt((n+1)/2).
        const DimerBasis d = assemble_dimer(g, 0.1, 4);
        const Matrix sigma = d.plus_block().transpose() * d.minus_block();
        CHECK((sigma - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.25);
        CHECK((sigma - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 0.2);
    }
    SECTION("overlap has the 2x2 block form") {
        const DimerBasis d = assemble_dimer(g, 1.2, 5);
        const Matrix s = d.columns.transpose() * d.columns;
        CHECK((s.topLeftCorner(5, 5) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((s.bottomRightCorner(5, 5) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((s.topRightCorner(5, 5) - s.bottomLeftCorner(5, 5).transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("ground-state overlap is exp(-a^2)") {
        for (double a : {0.3, 1.0, 2.0}) {
            const DimerBasis d = assemble_dimer(g, a, 1);
            CHECK((d.columns.col(0).dot(d.columns.col(1))) == Approx(std::exp(-a * a)).epsilon(1e-8));
        }
    }
}

TEST_CASE("fit rule", "[hermite]") {
    CHECK(dimer_fits(Grid(20.0, 1999), 5.0, 10));
    CHECK(dimer_fits(Grid(20.0, 1999), 1.5, 10));
    CHECK_FALSE(dimer_fits(Grid(10.0, 999), 5.0, 10));
    CHECK_THROWS_AS(hermite_columns(Grid(5.0, 99), 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(hermite_columns(Grid(5.0, 99), 6.0, 2), InvalidArgument);
}
