#include <doctest.h>

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/harness.hpp"
#include "fpe/reconstruct.hpp"

#include <cmath>
#include <numbers>

using namespace fpe;

namespace {

struct Setup {
    SdeModel model;
    EigenBasis basis;
    Discretization disc;
    Setup(int J, int ny = 127, int nx = 401)
        : model(linear_test_model(1e-2, 4.0)), basis(hermite_basis(model, J)) {
        disc.nx = nx;
        disc.ny = ny;
    }
};

} // namespace

TEST_CASE("single-term reconstruction is the bump times phi0") {
    Setup s(2);
    CoefficientState state = zero_state(2, s.disc.ny);
    state.a[0] = sine_mode_profile(s.disc.ny, 1); // nonnegative bump
    const DensityField d = reconstruct_density(state, s.basis, s.disc, s.model.R);
    for (std::size_t ix = 0; ix < d.x.size(); ix += 40)
        for (std::size_t iy = 0; iy < d.y.size(); iy += 20) {
            const double expect =
                state.a[0][iy] * s.basis.eval(0, d.y[iy], d.x[ix]);
            CHECK(d.values[ix][iy] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
            CHECK(d.values[ix][iy] >= -1e-15);
        }
}

TEST_CASE("decompose picks out a pure mode") {
    Setup s(3);
    const auto bump = sine_mode_profile(s.disc.ny, 2);
    const auto ygrid = interior_grid(s.model.R, std::size_t(s.disc.ny));
    auto rho = [&](double x, double y) {
        const double b = interp_cubic(bump, ygrid.front(), ygrid[1] - ygrid[0], y);
        return b * s.basis.eval(1, y, x);
    };
    const CoefficientState state = decompose_density(rho, s.basis, s.disc, s.model.R, 3);
    for (std::size_t iy = 0; iy < std::size_t(s.disc.ny); ++iy) {
        CHECK(state.a[1][iy] == doctest::Approx(bump[iy]).epsilon(1e-9).scale(1.0));
        CHECK(std::abs(state.a[0][iy]) < 1e-10);
        CHECK(std::abs(state.a[2][iy]) < 1e-10);
        CHECK(std::abs(state.a[3][iy]) < 1e-10);
    }
}

TEST_CASE("decompose then reconstruct is the identity on the band-limited span") {
    Setup s(4);
    CoefficientState state = zero_state(4, s.disc.ny);
    double seed = 0.53;
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i < s.disc.ny; ++i) {
            seed = std::fmod(seed * 977.0 + 0.173, 1.0);
            state.a[std::size_t(j)][std::size_t(i)] =
                (seed - 0.5) * sine_mode_profile(s.disc.ny, 1)[std::size_t(i)];
        }
    const auto ygrid = interior_grid(s.model.R, std::size_t(s.disc.ny));
    auto rho = [&](double x, double y) {
        const std::size_t iy =
            std::size_t(std::llround((y - ygrid.front()) / (ygrid[1] - ygrid[0])));
        double acc = 0.0;
        for (int j = 0; j <= 4; ++j)
            acc += state.a[std::size_t(j)][iy] * s.basis.eval(j, y, x);
        return acc;
    };
    const CoefficientState back = decompose_density(rho, s.basis, s.disc, s.model.R, 4);
    double worst = 0.0;
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i < s.disc.ny; ++i)
            worst = std::max(worst, std::abs(back.a[std::size_t(j)][std::size_t(i)] -
                                             state.a[std::size_t(j)][std::size_t(i)]));
    CHECK(worst < 1e-10);
}

TEST_CASE("stationary-shaped data has no fast content") {
    Setup s(4);
    auto rho = [&](double x, double y) {
        return std::exp(-0.5 * y * y) * s.basis.eval(0, y, x);
    };
    const CoefficientState state = decompose_density(rho, s.basis, s.disc, s.model.R, 4);
    for (int j = 1; j <= 4; ++j)
        for (int i = 0; i < s.disc.ny; ++i)
            CHECK(std::abs(state.a[std::size_t(j)][std::size_t(i)]) < 1e-10);
}

TEST_CASE("gaussian round trip bounded by the tail energy") {
    // coefficients to J = 20 serve as the oracle for the J = 8 truncation
    Setup s20(20, 63, 257);
    auto rho = [](double x, double y) {
        return std::exp(-0.5 * (x - y - 0.4) * (x - y - 0.4)) * std::exp(-0.5 * y * y);
    };
    const CoefficientState c20 = decompose_density(rho, s20.basis, s20.disc, s20.model.R, 20);
    const DensityField rec20 = reconstruct_density(c20, s20.basis, s20.disc, s20.model.R);

    CoefficientState c8 = zero_state(8, s20.disc.ny);
    for (int j = 0; j <= 8; ++j) c8.a[std::size_t(j)] = c20.a[std::size_t(j)];
    const DensityField rec8 = reconstruct_density(c8, s20.basis, s20.disc, s20.model.R);

    const double err = density_error(rec20, rec8).l2;
    // triangle bound: sum_{j>8} |c_j| ||phi_j||_L2, column-wise in y
    const double dy = rec20.y[1] - rec20.y[0];
    double bound_sq = 0.0;
    for (std::size_t iy = 0; iy < rec20.y.size(); ++iy) {
        double col = 0.0;
        for (int j = 9; j <= 20; ++j)
            col += std::abs(c20.a[std::size_t(j)][iy]) *
                   std::sqrt(s20.basis.l2_norm_squared(j));
        bound_sq += col * col * dy;
    }
    CHECK(err <= std::sqrt(bound_sq) + 1e-12);
    CHECK(err < 1e-6);
}

TEST_CASE("density_error basics and the closed-form gaussian distance") {
    Setup s(1, 255, 801);
    CoefficientState st = zero_state(1, s.disc.ny);
    st.a[0] = sine_mode_profile(s.disc.ny, 1);
    const DensityField d = reconstruct_density(st, s.basis, s.disc, s.model.R);
    const DensityError zero = density_error(d, d);
    CHECK(zero.l1 == 0.0);
    CHECK(zero.l2 == 0.0);
    CHECK(zero.linf == 0.0);

    DensityField empty = d;
    for (auto& col : empty.values)
        for (double& v : col) v = 0.0;
    CHECK(density_error(d, empty).l1 == doctest::Approx(density_mass(d)).epsilon(1e-12));

    // product gaussians offset in x: ||rho1 - rho2||_2^2 =
    // (1/(2 sqrt(pi))) * (1/sqrt(pi)) * (1 - exp(-a^2/4))
    const double a = 0.8;
    DensityField g1 = d, g2 = d;
    const double cx = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t ix = 0; ix < d.x.size(); ++ix)
        for (std::size_t iy = 0; iy < d.y.size(); ++iy) {
            const double ny = cx * std::exp(-0.5 * d.y[iy] * d.y[iy]);
            g1.values[ix][iy] = cx * std::exp(-0.5 * d.x[ix] * d.x[ix]) * ny;
            g2.values[ix][iy] = cx * std::exp(-0.5 * (d.x[ix] - a) * (d.x[ix] - a)) * ny;
        }
    const double expect = std::sqrt(1.0 / (2.0 * std::sqrt(std::numbers::pi)) *
                                    (1.0 / std::sqrt(std::numbers::pi)) *
                                    (1.0 - std::exp(-a * a / 4.0)));
    CHECK(density_error(g1, g2).l2 == doctest::Approx(expect).epsilon(1e-6));

    DensityField wrong = d;
    wrong.x.pop_back();
    wrong.values.pop_back();
    CHECK_THROWS_AS(density_error(d, wrong), GridMismatchError);
}

TEST_CASE("marginal consistency: x-integral picks up C0 a0 only") {
    Setup s(4);
    CoefficientState state = zero_state(4, s.disc.ny);
    state.a[0] = sine_mode_profile(s.disc.ny, 1);
    state.a[1] = sine_mode_profile(s.disc.ny, 2);
    state.a[3] = sine_mode_profile(s.disc.ny, 3);
    const DensityField d = reconstruct_density(state, s.basis, s.disc, s.model.R);
    const auto marg = density_marginal(d);
    const double c0 = std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t iy = 0; iy < d.y.size(); ++iy) {
        // near y = +-R the mode envelope reaches the x-truncation at 4 sigma,
        // so the vanishing-moment identity holds to the tail mass only
        const double tol = std::abs(d.y[iy]) <= 2.0 ? 1e-6 : 5e-3;
        CHECK(marg[iy] == doctest::Approx(c0 * state.a[0][iy]).epsilon(tol).scale(1.0));
    }
}

TEST_CASE("reconstruct is linear in the state") {
    Setup s(2, 63, 201);
    CoefficientState a = zero_state(2, 63), b = zero_state(2, 63), ab = zero_state(2, 63);
    a.a[0] = sine_mode_profile(63, 1);
    b.a[2] = sine_mode_profile(63, 2);
    for (int i = 0; i < 63; ++i) {
        ab.a[0][std::size_t(i)] = a.a[0][std::size_t(i)];
        ab.a[2][std::size_t(i)] = b.a[2][std::size_t(i)];
    }
    const DensityField da = reconstruct_density(a, s.basis, s.disc, s.model.R);
    const DensityField db = reconstruct_density(b, s.basis, s.disc, s.model.R);
    const DensityField dab = reconstruct_density(ab, s.basis, s.disc, s.model.R);
    for (std::size_t ix = 0; ix < da.x.size(); ix += 25)
        for (std::size_t iy = 0; iy < da.y.size(); iy += 9)
            CHECK(dab.values[ix][iy] ==
                  doctest::Approx(da.values[ix][iy] + db.values[ix][iy]).epsilon(1e-13));
}
