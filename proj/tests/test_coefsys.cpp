#include <doctest.h>

#include "fpe/coefsys.hpp"
#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/harness.hpp"
#include "fpe/transforms.hpp"

#include <cmath>
#include <numbers>

using namespace fpe;

namespace {

Pipeline linear_pipeline(double eps, int J, int ny = 255) {
    RunConfig cfg;
    cfg.disc.ny = ny;
    return make_pipeline(cfg, eps, J);
}

// smooth Dirichlet-compatible profile and its derivatives
struct Profile {
    double k;
    double R;
    double at(double y) const { return std::sin(k * std::numbers::pi * (y + R) / (2.0 * R)); }
    double d1(double y) const {
        const double w = k * std::numbers::pi / (2.0 * R);
        return w * std::cos(w * (y + R));
    }
};

} // namespace

TEST_CASE("assembled slow row matches the reduced transport term by term") {
    const double R = 4.0;
    Pipeline p = linear_pipeline(1e-2, 1);
    const auto& sys = p.system;
    Profile a0{1.0, R}, a1{2.0, R};
    std::vector<std::vector<double>> a(2, std::vector<double>(std::size_t(sys.ny)));
    for (int i = 0; i < sys.ny; ++i) {
        a[0][std::size_t(i)] = a0.at(sys.ygrid[std::size_t(i)]);
        a[1][std::size_t(i)] = a1.at(sys.ygrid[std::size_t(i)]);
    }
    const auto row = sys.coupling_row(0, a);
    // expected: d_y(y a0) + sqrt(2) d_y a1
    double worst = 0.0;
    for (int i = 8; i + 8 < sys.ny; ++i) {
        const double y = sys.ygrid[std::size_t(i)];
        const double expect = a0.at(y) + y * a0.d1(y) + std::numbers::sqrt2 * a1.d1(y);
        worst = std::max(worst, std::abs(row[std::size_t(i)] - expect));
    }
    CHECK(worst < 50.0 * sys.dy * sys.dy);
}

TEST_CASE("assembled fast rows match the normalized tables term by term") {
    const double R = 4.0;
    const int J = 3;
    Pipeline p = linear_pipeline(1e-2, J);
    const auto& sys = p.system;
    const Profile prof[] = {{1.0, R}, {2.0, R}, {3.0, R}, {1.0, R}};
    std::vector<std::vector<double>> a(std::size_t(J) + 1,
                                       std::vector<double>(std::size_t(sys.ny)));
    std::vector<double> amp = {1.0, 0.8, -0.6, 0.4};
    for (int j = 0; j <= J; ++j)
        for (int i = 0; i < sys.ny; ++i)
            a[std::size_t(j)][std::size_t(i)] =
                amp[std::size_t(j)] * prof[std::size_t(j)].at(sys.ygrid[std::size_t(i)]);

    for (int j = 1; j <= J; ++j) {
        const auto row = sys.coupling_row(j, a);
        double worst = 0.0;
        for (int i = 8; i + 8 < sys.ny; ++i) {
            const double y = sys.ygrid[std::size_t(i)];
            auto val = [&](int m) { return amp[std::size_t(m)] * prof[std::size_t(m)].at(y); };
            auto der = [&](int m) { return amp[std::size_t(m)] * prof[std::size_t(m)].d1(y); };
            // transport: sqrt(2) d_y(y a_j) + d_y a_{j-1} + 2(j+1) d_y a_{j+1}
            double expect = std::numbers::sqrt2 * (val(j) + y * der(j)) + der(j - 1);
            if (j + 1 <= J) expect += 2.0 * double(j + 1) * der(j + 1);
            // reaction: -(2j+1)[a_j/sqrt(2) + y a_{j+1} + sqrt(2)(j+2) a_{j+2}]
            expect -= (2.0 * double(j) + 1.0) * val(j) / std::numbers::sqrt2;
            if (j + 1 <= J) expect -= (2.0 * double(j) + 1.0) * y * val(j + 1);
            if (j + 2 <= J)
                expect -= (2.0 * double(j) + 1.0) * std::numbers::sqrt2 * double(j + 2) *
                          val(j + 2);
            worst = std::max(worst, std::abs(row[std::size_t(i)] - expect));
        }
        CHECK(worst < 200.0 * sys.dy * sys.dy);
    }
}

TEST_CASE("zero tensors decouple the system") {
    RunConfig cfg;
    cfg.g = "zero";
    cfg.disc.ny = 63;
    Pipeline p = make_pipeline(cfg, 1e-3, 2);
    std::vector<std::vector<double>> a(3, std::vector<double>(63, 1.0));
    const auto rates = p.system.coupling_rates(a);
    for (const auto& r : rates)
        for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("zero state stays zero") {
    Pipeline p = linear_pipeline(1e-3, 2, 63);
    CoefficientState s = zero_state(2, 63);
    s = step(p.system, s, 1e-4);
    for (const auto& row : s.a)
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("decoupled fast mode obeys the relaxation-diffusion decay law") {
    RunConfig cfg;
    cfg.g = "zero";
    cfg.disc.ny = 255;
    const double eps = 1e-3;
    Pipeline p = make_pipeline(cfg, eps, 1);
    const auto& sys = p.system;
    CoefficientState s = zero_state(1, sys.ny);
    s.a[1] = sine_mode_profile(sys.ny, 1);
    const double n0 = norm_l2(s.a[1], sys.dy);

    const double dt = 0.002 * eps;
    const double T = 10.0 * eps;
    const long nsteps = std::lround(T / dt);
    for (long n = 0; n < nsteps; ++n) s = step(sys, s, dt);
    const double n1 = norm_l2(s.a[1], sys.dy);

    SineTransform dst(std::size_t(sys.ny));
    const double mu1 = dst.laplacian_eigenvalue(1, sys.dy);
    const double expect = n0 * std::exp(-10.0) * std::exp(-sys.diff * mu1 * T);
    CHECK(n1 == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("heat decay of a slow eigen-sine with no drift") {
    RunConfig cfg;
    cfg.g = "zero";
    cfg.disc.ny = 255;
    Pipeline p = make_pipeline(cfg, 1e-2, 1);
    const auto& sys = p.system;
    CoefficientState s = zero_state(1, sys.ny);
    s.a[0] = sine_mode_profile(sys.ny, 2);
    const double n0 = norm_l2(s.a[0], sys.dy);
    const double T = 0.1, dt = 1e-4;
    for (long n = 0; n < std::lround(T / dt); ++n) s = step(sys, s, dt);
    SineTransform dst(std::size_t(sys.ny));
    const double mu2 = dst.laplacian_eigenvalue(2, sys.dy);
    CHECK(norm_l2(s.a[0], sys.dy) ==
          doctest::Approx(n0 * std::exp(-sys.diff * mu2 * T)).epsilon(1e-4));
}

TEST_CASE("mass is non-increasing for pure absorption-diffusion") {
    RunConfig cfg;
    cfg.g = "zero";
    cfg.disc.ny = 127;
    Pipeline p = make_pipeline(cfg, 1e-2, 1);
    const auto& sys = p.system;
    CoefficientState s = zero_state(1, sys.ny);
    for (int i = 0; i < sys.ny; ++i)
        s.a[0][std::size_t(i)] = std::exp(-sys.ygrid[std::size_t(i)] * sys.ygrid[std::size_t(i)]);
    double prev = 1e300;
    for (int n = 0; n < 200; ++n) {
        double mass = 0.0;
        for (double v : s.a[0]) mass += v * sys.dy;
        CHECK(mass <= prev + 1e-14);
        prev = mass;
        s = step(sys, s, 1e-3);
    }
}

TEST_CASE("smoke run stays finite over T = 1") {
    Pipeline p = linear_pipeline(1e-2, 2, 127);
    CoefficientState s = zero_state(2, 127);
    s.a[0] = sine_mode_profile(127, 1);
    const NormSeries series = integrate(p.system, s, 1.0, 0.0, 50);
    for (const auto& l2 : series.l2)
        for (double v : l2) CHECK(std::isfinite(v));
}

TEST_CASE("fast mode fed by a0 saturates at O(eps)") {
    std::vector<double> epss = {1e-2, std::pow(10.0, -2.5), 1e-3};
    std::vector<double> sat;
    for (double eps : epss) {
        Pipeline p = linear_pipeline(eps, 2);
        const auto& sys = p.system;
        CoefficientState s = zero_state(2, sys.ny);
        s.a[0] = sine_mode_profile(sys.ny, 1);
        const double dt = std::min(0.05 * eps, default_dt(sys));
        const double T = 30.0 * eps;
        double peak = 0.0;
        for (long n = 0; n < std::lround(T / dt); ++n) {
            s = step(sys, s, dt);
            if (s.t >= 5.0 * eps) peak = std::max(peak, norm_l2(s.a[1], sys.dy));
        }
        sat.push_back(peak);
    }
    const double slope = (std::log(sat.front()) - std::log(sat.back())) /
                         (std::log(epss.front()) - std::log(epss.back()));
    CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("integrate is additive in the initial data") {
    Pipeline p = linear_pipeline(1e-2, 2, 127);
    const auto& sys = p.system;
    CoefficientState sa = zero_state(2, 127), sb = zero_state(2, 127), sab = zero_state(2, 127);
    sa.a[0] = sine_mode_profile(127, 1);
    sb.a[1] = sine_mode_profile(127, 3);
    for (int i = 0; i < 127; ++i) {
        sab.a[0][std::size_t(i)] = sa.a[0][std::size_t(i)];
        sab.a[1][std::size_t(i)] = sb.a[1][std::size_t(i)];
    }
    const double dt = default_dt(sys);
    for (int n = 0; n < 50; ++n) {
        sa = step(sys, sa, dt);
        sb = step(sys, sb, dt);
        sab = step(sys, sab, dt);
    }
    for (int j = 0; j <= 2; ++j)
        for (int i = 0; i < 127; ++i)
            CHECK(sab.a[std::size_t(j)][std::size_t(i)] ==
                  doctest::Approx(sa.a[std::size_t(j)][std::size_t(i)] +
                                  sb.a[std::size_t(j)][std::size_t(i)])
                      .epsilon(1e-11)
                      .scale(1.0));
}

TEST_CASE("blow-up guard raises StepUnstable") {
    // a stiff slow drift puts a large reaction coefficient in the explicit
    // block; dt far beyond the CFL rule then diverges forward Euler
    RunConfig cfg;
    cfg.g = "0 - 50*x";
    cfg.disc.ny = 63;
    Pipeline p = make_pipeline(cfg, 1.0, 1);
    CoefficientState s = zero_state(1, 63);
    s.a[1] = sine_mode_profile(63, 1);
    CHECK(default_dt(p.system) < 0.01); // the rule would have kept us safe
    CHECK_THROWS_AS(
        [&] {
            for (int n = 0; n < 400; ++n) s = step(p.system, s, 0.1);
        }(),
        StepUnstableError);
}
