#include <doctest.h>

#include "fpe/errors.hpp"
#include "fpe/expr.hpp"
#include "fpe/model.hpp"

#include <cmath>

using namespace fpe;

TEST_CASE("hyperbolicity: linear attracting drift is fine at every y") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    const double ys[] = {-1.0, 0.0, 1.0};
    const auto rep = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
    CHECK(rep.rootless_y.empty());
}

TEST_CASE("hyperbolicity: f = -x has the single root at zero") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    m.f = make_drift("neg_x");
    const double ys[] = {0.7};
    const auto rep = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK(rep.ok);
}

TEST_CASE("hyperbolicity: cubic degenerate root is flagged") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    m.f = [](double x, double) { return -x * x * x; };
    const double ys[] = {0.0, 0.5};
    const auto rep = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK_FALSE(rep.ok);
    REQUIRE(!rep.violations.empty());
    CHECK(std::abs(rep.violations[0].x_star) < 1e-6);
    CHECK(std::abs(rep.violations[0].dfdx) <= kHyperbolicityTol);
}

TEST_CASE("hyperbolicity: affine family a(y) - b x passes for every sample") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    m.f = [](double x, double y) { return 0.8 * std::sin(y) + 0.3 - 2.5 * x; };
    std::vector<double> ys;
    for (int i = -6; i <= 6; ++i) ys.push_back(0.6 * i / 2.0);
    const auto rep = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
}

TEST_CASE("hyperbolicity is deterministic") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    const double ys[] = {-0.4, 1.1};
    const auto r1 = check_normal_hyperbolicity(m, ys, 8.0);
    const auto r2 = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK(r1.ok == r2.ok);
    REQUIRE(r1.violations.size() == r2.violations.size());
    CHECK(r1.rootless_y == r2.rootless_y);
}

TEST_CASE("rootless drift is reported, not fatal") {
    SdeModel m = linear_test_model(1e-2, 4.0);
    m.f = [](double, double) { return 1.0; };
    const double ys[] = {0.0};
    const auto rep = check_normal_hyperbolicity(m, ys, 8.0);
    CHECK(rep.ok);
    REQUIRE(rep.rootless_y.size() == 1);
}

TEST_CASE("validate_model accepts the linear example") {
    SdeModel m = linear_test_model(1e-3, 4.0);
    Discretization disc;
    disc.nx = 101;
    disc.ny = 31;
    const auto rep = validate_model(m, disc);
    CHECK(rep.ok);
}

TEST_CASE("validate_model rejects nonpositive noise") {
    SdeModel m = linear_test_model(1e-3, 4.0);
    m.sigma1 = 0.0;
    Discretization disc;
    const auto rep = validate_model(m, disc);
    CHECK_FALSE(rep.ok);
    CHECK(rep.field == "sigma1");
}

TEST_CASE("validate_model names the drift with a non-finite sample") {
    SdeModel m = linear_test_model(1e-3, 4.0);
    m.f = [](double x, double y) {
        if (std::abs(x - 2.0) < 0.05 && std::abs(y) < 0.5) return std::nan("");
        return y - x;
    };
    Discretization disc;
    disc.nx = 201;
    disc.ny = 63;
    const auto rep = validate_model(m, disc);
    CHECK_FALSE(rep.ok);
    CHECK(rep.field == "f");
}

TEST_CASE("expression grammar covers the documented operations") {
    auto f = compile_expression("-x^3 - x + y");
    CHECK(f(2.0, 1.0) == doctest::Approx(-8.0 - 2.0 + 1.0));
    auto g = compile_expression("exp(-(x^2)) * sin(y) + cos(x*y)/2");
    CHECK(g(0.0, 1.0) == doctest::Approx(std::sin(1.0) + 0.5));
    auto h = compile_expression("2 * x ^ 2 ^ 2"); // right-assoc power
    CHECK(h(3.0, 0.0) == doctest::Approx(2.0 * 81.0));
    CHECK_THROWS_AS(compile_expression("x +"), ConfigError);
    CHECK_THROWS_AS(compile_expression("tan(x)"), ConfigError);
    CHECK_THROWS_AS(compile_expression("x y"), ConfigError);
}

TEST_CASE("drift catalogue") {
    auto f = make_drift("ou_linear");
    CHECK(f(1.0, 3.0) == doctest::Approx(2.0));
    auto g = make_drift("cubic_well");
    CHECK(g(2.0, 0.3) == doctest::Approx(-8.0 - 2.0 + 0.3));
    auto e = make_drift("y - 2*x"); // falls through to the expression parser
    CHECK(e(1.0, 5.0) == doctest::Approx(3.0));
}
