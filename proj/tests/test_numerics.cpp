#include <doctest.h>

#include "fpe/grid.hpp"
#include "fpe/linalg.hpp"
#include "fpe/quadrature.hpp"
#include "fpe/transforms.hpp"

#include <cmath>
#include <numbers>

using namespace fpe;

TEST_CASE("thomas solve matches dense application") {
    const std::size_t n = 40;
    std::vector<double> lower(n - 1), diag(n), upper(n - 1), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = 4.0 + 0.1 * double(i % 5);
        x[i] = std::sin(double(i) * 0.7);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        lower[i] = -1.0 + 0.05 * double(i % 3);
        upper[i] = -1.2;
    }
    const auto rhs = apply_tridiagonal(lower, diag, upper, x);
    const auto sol = solve_tridiagonal(lower, diag, upper, rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("symmetric tridiagonal eigen: Dirichlet Laplacian spectrum") {
    const std::size_t n = 64;
    std::vector<double> diag(n, 2.0), off(n - 1, -1.0);
    const auto top = symtri_largest_eigenvalues(diag, off, 3);
    auto exact = [&](std::size_t k) {
        return 2.0 - 2.0 * std::cos(double(k) * std::numbers::pi / double(n + 1));
    };
    CHECK(top[0] == doctest::Approx(exact(n)).epsilon(1e-12));
    CHECK(top[2] == doctest::Approx(exact(n - 2)).epsilon(1e-12));

    const auto v = symtri_eigenvector(diag, off, top[0]);
    // residual check
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mv = 2.0 * v[i];
        if (i > 0) mv -= v[i - 1];
        if (i + 1 < n) mv -= v[i + 1];
        resid = std::max(resid, std::abs(mv - top[0] * v[i]));
    }
    CHECK(resid < 1e-10);
}

TEST_CASE("full QL eigen agrees with bisection") {
    const std::size_t n = 50;
    std::vector<double> diag(n), off(n - 1);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::cos(double(i));
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = 0.3 + 0.2 * std::sin(double(i));
    const auto full = symtri_eigen_full(diag, off);
    const auto top = symtri_largest_eigenvalues(diag, off, 5);
    for (std::size_t m = 0; m < 5; ++m)
        CHECK(full.values[n - 1 - m] == doctest::Approx(top[m]).epsilon(1e-11));
    // orthogonality of eigenvector columns
    double dot01 = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot01 += full.z[i * n + 0] * full.z[i * n + 1];
    CHECK(std::abs(dot01) < 1e-11);
}

TEST_CASE("gauss-hermite integrates gaussian moments exactly") {
    const auto rule = gauss_hermite(32);
    double m0 = 0.0, m2 = 0.0, m8 = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double z = rule.nodes[q];
        m0 += rule.weights[q];
        m2 += rule.weights[q] * z * z;
        m8 += rule.weights[q] * std::pow(z, 8);
    }
    const double sq = std::sqrt(std::numbers::pi);
    CHECK(m0 == doctest::Approx(sq).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(0.5 * sq).epsilon(1e-13));
    CHECK(m8 == doctest::Approx(105.0 / 16.0 * sq).epsilon(1e-12));
}

TEST_CASE("gauss-hermite 200 nodes stays accurate") {
    const auto rule = gauss_hermite(200);
    double m0 = 0.0;
    for (double w : rule.weights) m0 += w;
    CHECK(m0 == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("hermite recurrence values") {
    CHECK(hermite_h(0, 1.3) == doctest::Approx(1.0));
    CHECK(hermite_h(1, 1.3) == doctest::Approx(2.6));
    CHECK(hermite_h(2, 1.3) == doctest::Approx(4.0 * 1.69 - 2.0));
    const auto all = hermite_all(6, -0.7);
    for (std::size_t k = 0; k <= 6; ++k)
        CHECK(all[k] == doctest::Approx(hermite_h(k, -0.7)).epsilon(1e-14));
}

TEST_CASE("sine transform round trip and laplacian eigenvalues") {
    for (std::size_t n : {15u, 20u, 127u}) {
        SineTransform dst(n);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(1.7 * double(i)) + 0.2;
        const auto c = dst.forward(x);
        const auto back = dst.inverse(c);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
    // FFT path vs matrix path must agree
    SineTransform fast(255), slow(255);
    std::vector<double> x(255);
    for (std::size_t i = 0; i < 255; ++i) x[i] = std::cos(double(i) * 0.3);
    const auto cf = fast.forward(x);
    for (std::size_t k = 1; k <= 255; ++k) {
        double direct = 0.0;
        for (std::size_t i = 1; i <= 255; ++i)
            direct += x[i - 1] * std::sin(double(i * k) * std::numbers::pi / 256.0);
        CHECK(cf[k - 1] == doctest::Approx(direct * 2.0 / 256.0).epsilon(1e-10));
    }
}

TEST_CASE("penta cholesky solves S2-style systems") {
    const std::size_t n = 30;
    std::vector<double> diag(n), b1(n - 1), b2(n - 2);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 7.0;
    for (std::size_t i = 0; i + 1 < n; ++i) b1[i] = -4.0;
    for (std::size_t i = 0; i + 2 < n; ++i) b2[i] = 1.0;
    PentaCholesky chol(diag, b1, b2);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.4 * double(i));
    // rhs = A x
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] += diag[i] * x[i];
        if (i > 0) rhs[i] += b1[i - 1] * x[i - 1];
        if (i + 1 < n) rhs[i] += b1[i] * x[i + 1];
        if (i >= 2) rhs[i] += b2[i - 2] * x[i - 2];
        if (i + 2 < n) rhs[i] += b2[i] * x[i + 2];
    }
    const auto sol = chol.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-11));
}

TEST_CASE("cubic interpolation reproduces cubics") {
    std::vector<double> f(12);
    auto poly = [](double x) { return 1.0 + x - 0.5 * x * x + 0.25 * x * x * x; };
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = poly(0.3 * double(i));
    CHECK(interp_cubic(f, 0.0, 0.3, 1.234) == doctest::Approx(poly(1.234)).epsilon(1e-12));
    CHECK(interp_cubic(f, 0.0, 0.3, 0.05) == doctest::Approx(poly(0.05)).epsilon(1e-10));
}
