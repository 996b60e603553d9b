#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fpe {

enum class DriftKind { OrnsteinUhlenbeck, GeneralAdditive };

/// Fast-slow SDE with additive noise on the strip R x (-R, R):
///   dx = (1/eps) f(x,y) dt + (sigma1/sqrt(eps)) dW1
///   dy = g(x,y) dt + sigma2 dW2
struct SdeModel {
    std::function<double(double, double)> f; // fast drift
    std::function<double(double, double)> g; // slow drift
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double epsilon = 0.0;
    double R = 0.0;
    DriftKind kind = DriftKind::GeneralAdditive;
    std::string f_name, g_name; // catalogue names or expressions, for reporting
};

struct Discretization {
    double X = 8.0;       // computational x-domain [-X, X]
    int nx = 801;         // x grid points (including endpoints)
    int ny = 255;         // interior y grid points on (-R, R)
    double dt = 0.0;      // time step; <= 0 selects the CFL rule
    int quad_nodes = 64;  // Gauss-Hermite node count for coupling integrals
};

/// Named drifts usable in configs; anything not in the catalogue is parsed
/// as an expression in x and y.
std::function<double(double, double)> make_drift(const std::string& name);

/// Section 5 linear test problem: f = y - x, g = -x, sigma1 = sigma2 = sqrt(2).
SdeModel linear_test_model(double epsilon, double R);

struct HyperbolicityViolation {
    double x_star;
    double y;
    double dfdx;
};

struct HyperbolicityReport {
    bool ok = true;
    std::vector<HyperbolicityViolation> violations;
    std::vector<double> rootless_y; // y samples where f has no bracketed root
};

/// Checks that every root x* of f(., y) on [-X, X] has |d_x f(x*, y)| above
/// the hyperbolicity tolerance. Roots are located by sign-change bisection
/// on 512 uniform subintervals.
HyperbolicityReport check_normal_hyperbolicity(const SdeModel& model,
                                               std::span<const double> y_samples,
                                               double X);

struct ModelReport {
    bool ok = true;
    std::string field;   // first failing field when !ok
    std::string message;
};

/// Positivity of the noise amplitudes plus finiteness/boundedness of f, g and
/// their centered-difference gradients sampled on the grid.
ModelReport validate_model(const SdeModel& model, const Discretization& disc,
                           double magnitude_cap = 1e6);

inline constexpr double kHyperbolicityTol = 1e-8;
inline constexpr double kRootBisectionTol = 1e-12;

} // namespace fpe
