#include <doctest.h>

#include "fpe/config.hpp"
#include "fpe/csv.hpp"
#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace fpe;

TEST_CASE("loglog fit recovers a power law and excludes saturated points") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
        pts.emplace_back(x, 3.0 * std::pow(x, 0.5));
    RateFit fit = fit_loglog(pts);
    REQUIRE(fit.available);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));

    // saturate the smallest two points below 10x the floor
    pts[3].second = 1.5e-4;
    pts[4].second = 1.5e-4;
    fit = fit_loglog(pts, 2e-5); // excludes y < 2e-4
    CHECK(!fit.available);       // only 3 surviving points
    pts[3].second = 3.0 * std::pow(1e-5, 0.5);
    fit = fit_loglog(pts, 2e-5);
    REQUIRE(fit.available); // 4 clean points remain
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("config round trip with defaults and overrides") {
    const std::string text = R"(
# linear example setup
[model]
kind = ou
f = ou_linear
g = neg_x
sigma1 = 1.4142135623730951
sigma2 = 1.4142135623730951
epsilon = 2e-3
R = 3.5

[disc]
X = 7.5
nx = 501
ny = 127
quad_nodes = 48

[splitting]
zeta = 1e-3

[manifold]
lp_tol = 1e-9
mesh_nodes = 64

[sweep]
eps_list = 1e-2, 1e-3, 1e-4, 1e-5
J = 5
quantities = slow_error, gap_ok
out = /tmp/fpe_sweep_test
seed = 7
)";
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.epsilon == 2e-3);
    CHECK(cfg.R == 3.5);
    CHECK(cfg.disc.nx == 501);
    CHECK(cfg.disc.quad_nodes == 48);
    CHECK(cfg.zeta == 1e-3);
    CHECK(cfg.lp_tol == 1e-9);
    CHECK(cfg.lp_mesh_nodes == 64);
    CHECK(cfg.eps_list.size() == 4);
    CHECK(cfg.J == 5);
    CHECK(cfg.quantities == std::vector<std::string>{"slow_error", "gap_ok"});
    CHECK(cfg.seed == 7);
    const SdeModel m = cfg.make_model();
    CHECK(m.f(1.0, 2.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(parse_config_text("[model]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nepsilon = banana\n"), ConfigError);
}

TEST_CASE("csv writer emits round-trip decimals deterministically") {
    const std::string path = "/tmp/fpe_csv_test.csv";
    {
        CsvWriter csv(path, {"a", "b"});
        csv.row({1.0 / 3.0, 1e-300});
        csv.row({0.1, 2.5066282746310002});
    }
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all == "a,b\n0.3333333333333333,1e-300\n0.1,2.5066282746310002\n");
    CHECK(format_double(0.5) == "0.5");
    std::remove(path.c_str());
}

TEST_CASE("rough profile is H2-normalized and deterministic") {
    const auto u1 = rough_sine_profile(255, 4.0, 2.5, 11);
    const auto u2 = rough_sine_profile(255, 4.0, 2.5, 11);
    CHECK(u1 == u2);
    CHECK(norm_h2(u1, 8.0 / 256.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto u3 = rough_sine_profile(255, 4.0, 2.5, 23);
    CHECK(u1 != u3);
}

TEST_CASE("decay exponent measurement hits lambda_j/eps") {
    RunConfig cfg;
    cfg.disc.ny = 255;
    Pipeline p = make_pipeline(cfg, 1e-3, 2);
    const double e1 = measure_decay_exponent(p.system, 1);
    CHECK(e1 == doctest::Approx(1.0 / 1e-3).epsilon(0.05));
}

TEST_CASE("gap boundary follows the -1/6 law") {
    RunConfig cfg;
    cfg.disc.ny = 127;
    std::vector<double> eps_list;
    for (int k = 0; k <= 6; ++k) eps_list.push_back(std::pow(10.0, -2.0 - k));
    const auto boundary = gap_boundary(cfg, eps_list, 18);
    REQUIRE(boundary.size() >= 4);
    const RateFit fit = fit_loglog(boundary);
    REQUIRE(fit.available);
    CHECK(fit.slope == doctest::Approx(-1.0 / 6.0).epsilon(0.0).scale(1.0).epsilon(0.3));
    CHECK(std::abs(fit.slope + 1.0 / 6.0) < 0.05);
}

TEST_CASE("sweep outputs are a pure function of the config") {
    SweepPlan plan;
    plan.base = RunConfig{};
    plan.base.disc.ny = 127;
    plan.eps_list = {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)};
    plan.quantities = {"fast_residual"};
    plan.J = 2;
    plan.out_dir = "/tmp/fpe_sweep_det_a";
    run_sweep(plan);
    plan.out_dir = "/tmp/fpe_sweep_det_b";
    run_sweep(plan);
    std::ifstream fa("/tmp/fpe_sweep_det_a/fast_residual.csv");
    std::ifstream fb("/tmp/fpe_sweep_det_b/fast_residual.csv");
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(!sa.empty());
    CHECK(sa == sb);
    std::filesystem::remove_all("/tmp/fpe_sweep_det_a");
    std::filesystem::remove_all("/tmp/fpe_sweep_det_b");
}

TEST_CASE("per-point sweep failures are collected, not fatal") {
    SweepPlan plan;
    plan.base = RunConfig{};
    plan.base.disc.ny = 255;
    // the largest eps leaves no slow modes (lambda/zeta < 1), which throws
    // inside the point pipeline; the sweep must continue and fit the rest
    plan.eps_list = {2.0, 1e-3, std::pow(10.0, -3.5), 1e-4, std::pow(10.0, -4.5)};
    plan.quantities = {"manifold_distance"};
    plan.J = 2;
    plan.out_dir = "/tmp/fpe_sweep_fail";
    const auto fits = run_sweep(plan);
    REQUIRE(fits.count("manifold_distance"));
    CHECK(fits.at("manifold_distance").available); // 4 surviving points
    CHECK(std::filesystem::exists("/tmp/fpe_sweep_fail/failures.log"));
    std::filesystem::remove_all("/tmp/fpe_sweep_fail");
}

TEST_CASE("run_sweep writes per-quantity csvs and returns fits") {
    SweepPlan plan;
    plan.base = RunConfig{};
    plan.base.disc.ny = 127;
    plan.eps_list = {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)};
    plan.quantities = {"fast_residual"};
    plan.J = 2;
    plan.out_dir = "/tmp/fpe_sweep_unit";
    const auto fits = run_sweep(plan);
    REQUIRE(fits.count("fast_residual"));
    REQUIRE(fits.at("fast_residual").available);
    CHECK(fits.at("fast_residual").slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(std::filesystem::exists("/tmp/fpe_sweep_unit/fast_residual.csv"));
    std::filesystem::remove_all("/tmp/fpe_sweep_unit");
}
