#include "fpe/model.hpp"

#include "fpe/errors.hpp"
#include "fpe/expr.hpp"
#include "fpe/grid.hpp"

#include <cmath>

namespace fpe {

std::function<double(double, double)> make_drift(const std::string& name) {
    if (name == "ou_linear") return [](double x, double y) { return y - x; };
    if (name == "neg_x") return [](double x, double) { return -x; };
    if (name == "zero") return [](double, double) { return 0.0; };
    if (name == "cubic_well") return [](double x, double y) { return -x * x * x - x + y; };
    return compile_expression(name);
}

SdeModel linear_test_model(double epsilon, double R) {
    SdeModel m;
    m.f = make_drift("ou_linear");
    m.g = make_drift("neg_x");
    m.f_name = "ou_linear";
    m.g_name = "neg_x";
    m.sigma1 = std::sqrt(2.0);
    m.sigma2 = std::sqrt(2.0);
    m.epsilon = epsilon;
    m.R = R;
    m.kind = DriftKind::OrnsteinUhlenbeck;
    return m;
}

namespace {

double centered_dfdx(const std::function<double(double, double)>& f, double x, double y) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (f(x + h, y) - f(x - h, y)) / (2.0 * h);
}

} // namespace

HyperbolicityReport check_normal_hyperbolicity(const SdeModel& model,
                                               std::span<const double> y_samples,
                                               double X) {
    constexpr int kBrackets = 512;
    HyperbolicityReport report;
    for (double y : y_samples) {
        bool found_root = false;
        double prev_x = -X;
        double prev_f = model.f(prev_x, y);
        for (int i = 1; i <= kBrackets; ++i) {
            const double x = -X + 2.0 * X * double(i) / double(kBrackets);
            const double fx = model.f(x, y);
            const bool sign_change = (prev_f == 0.0) || (prev_f * fx < 0.0) || (fx == 0.0);
            if (sign_change) {
                double a = prev_x, b = x, fa = prev_f;
                while (b - a > kRootBisectionTol) {
                    const double mid = 0.5 * (a + b);
                    const double fm = model.f(mid, y);
                    if (fa * fm <= 0.0) b = mid;
                    else { a = mid; fa = fm; }
                }
                const double x_star = 0.5 * (a + b);
                // skip duplicates from a root sitting on a bracket boundary
                const bool dup = !report.violations.empty() &&
                                 std::abs(report.violations.back().x_star - x_star) < 1e-9 &&
                                 report.violations.back().y == y;
                found_root = true;
                const double slope = centered_dfdx(model.f, x_star, y);
                if (std::abs(slope) <= kHyperbolicityTol && !dup) {
                    report.ok = false;
                    report.violations.push_back({x_star, y, slope});
                }
            }
            prev_x = x;
            prev_f = fx;
        }
        if (!found_root) report.rootless_y.push_back(y);
    }
    return report;
}

ModelReport validate_model(const SdeModel& model, const Discretization& disc,
                           double magnitude_cap) {
    auto fail = [](const std::string& field, const std::string& msg) {
        return ModelReport{false, field, msg};
    };
    if (!(model.sigma1 > 0.0)) return fail("sigma1", "must be positive");
    if (!(model.sigma2 > 0.0)) return fail("sigma2", "must be positive");
    if (!(model.epsilon > 0.0)) return fail("epsilon", "must be positive");
    if (!(model.R > 0.0)) return fail("R", "must be positive");
    if (!model.f) return fail("f", "drift not set");
    if (!model.g) return fail("g", "drift not set");

    const auto xs = linspace(-disc.X, disc.X, std::size_t(disc.nx));
    const auto ys = interior_grid(model.R, std::size_t(disc.ny));
    for (double y : ys) {
        for (double x : xs) {
            const double fv = model.f(x, y);
            const double gv = model.g(x, y);
            if (!std::isfinite(fv) || std::abs(fv) > magnitude_cap)
                return fail("f", "non-finite or unbounded at x=" + std::to_string(x) +
                                     ", y=" + std::to_string(y));
            if (!std::isfinite(gv) || std::abs(gv) > magnitude_cap)
                return fail("g", "non-finite or unbounded at x=" + std::to_string(x) +
                                     ", y=" + std::to_string(y));
            const double hy = 1e-6 * std::max(1.0, std::abs(y));
            const double dfx = centered_dfdx(model.f, x, y);
            const double dgx = centered_dfdx(model.g, x, y);
            const double dfy = (model.f(x, y + hy) - model.f(x, y - hy)) / (2.0 * hy);
            const double dgy = (model.g(x, y + hy) - model.g(x, y - hy)) / (2.0 * hy);
            if (!std::isfinite(dfx) || std::abs(dfx) > magnitude_cap ||
                !std::isfinite(dfy) || std::abs(dfy) > magnitude_cap)
                return fail("f", "gradient non-finite or unbounded at x=" +
                                     std::to_string(x) + ", y=" + std::to_string(y));
            if (!std::isfinite(dgx) || std::abs(dgx) > magnitude_cap ||
                !std::isfinite(dgy) || std::abs(dgy) > magnitude_cap)
                return fail("g", "gradient non-finite or unbounded at x=" +
                                     std::to_string(x) + ", y=" + std::to_string(y));
        }
    }
    return ModelReport{};
}

} // namespace fpe
