#pragma once

#include "fpe/model.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace fpe {

/// Flux-form discretization of the fast Fokker-Planck operator
///   L1 u = (sigma1^2/2) u'' - (f u)'
/// on the uniform grid over [-X, X] with zero-flux closure at both ends.
/// Row i couples to i-1 (lower), i (diag), i+1 (upper). The scheme telescopes,
/// so the plain grid sum of L1 u vanishes identically.
struct L1Operator {
    std::vector<double> lower, diag, upper;
    double dx = 0.0;

    std::vector<double> apply(std::span<const double> u) const {
        const std::size_t n = diag.size();
        std::vector<double> v(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * u[i];
            if (i > 0) s += lower[i - 1] * u[i - 1];
            if (i + 1 < n) s += upper[i] * u[i + 1];
            v[i] = s;
        }
        return v;
    }
};

inline L1Operator build_l1_operator(const SdeModel& model, double y,
                                    const Discretization& disc) {
    const std::size_t n = std::size_t(disc.nx);
    const double dx = 2.0 * disc.X / double(disc.nx - 1);
    const double nu = 0.5 * model.sigma1 * model.sigma1;
    L1Operator op;
    op.dx = dx;
    op.lower.assign(n - 1, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n - 1, 0.0);
    // flux F_{i+1/2} = nu (u_{i+1} - u_i)/dx - f_{i+1/2} (u_i + u_{i+1})/2,
    // L1 u_i = (F_{i+1/2} - F_{i-1/2})/dx, zero flux at the domain faces
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xf = -disc.X + dx * (double(i) + 0.5);
        const double ff = model.f(xf, y);
        // contribution of F_{i+1/2} to rows i and i+1
        const double a = nu / dx - 0.5 * ff;  // multiplies u_{i+1}
        const double b = -nu / dx - 0.5 * ff; // multiplies u_i
        op.diag[i] += b / dx;
        op.upper[i] += a / dx;
        op.diag[i + 1] -= a / dx;
        op.lower[i] -= b / dx;
    }
    return op;
}

} // namespace fpe
