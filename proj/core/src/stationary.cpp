#include "fpe/stationary.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"

#include <algorithm>
#include <cmath>

namespace fpe {

StationaryDensity stationary_density(const SdeModel& model, double y,
                                     const Discretization& disc, double tail_tol) {
    StationaryDensity out;
    out.y_param = y;
    out.x = linspace(-disc.X, disc.X, std::size_t(disc.nx));
    out.dx = 2.0 * disc.X / double(disc.nx - 1);

    // d/dx log p_s = 2 f / sigma1^2; anchor Psi at x = 0, the anchor choice
    // is absorbed by the normalizer.
    const double inv_nu = 2.0 / (model.sigma1 * model.sigma1);
    std::vector<double> psi(out.x.size());
    for (std::size_t i = 0; i < out.x.size(); ++i) psi[i] = inv_nu * model.f(out.x[i], y);
    const std::size_t anchor = std::size_t(std::llround((0.0 + disc.X) / out.dx));
    std::vector<double> Psi =
        cumulative_trapezoid(psi, out.dx, std::min(anchor, out.x.size() - 1));

    // subtract the max before exponentiating
    const double m = *std::max_element(Psi.begin(), Psi.end());
    out.values.resize(Psi.size());
    for (std::size_t i = 0; i < Psi.size(); ++i) out.values[i] = std::exp(Psi[i] - m);

    const double mass = trapezoid(out.values, out.dx);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw Error("stationary_density: degenerate mass");
    for (double& v : out.values) v /= mass;
    out.normalizer = std::exp(-m) / mass;

    // tail check: mass in |x| >= 0.95 X signals a too-small domain
    double tail = 0.0;
    for (std::size_t i = 0; i + 1 < out.x.size(); ++i) {
        const double xm = 0.5 * (out.x[i] + out.x[i + 1]);
        if (std::abs(xm) >= 0.95 * disc.X)
            tail += 0.5 * (out.values[i] + out.values[i + 1]) * out.dx;
    }
    if (tail > tail_tol)
        throw TailMassExceededError("stationary_density: tail mass " + std::to_string(tail) +
                                    " exceeds tolerance; increase X");
    return out;
}

std::vector<double> ProjectionPair::apply_p(std::span<const double> u) const {
    double integral = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) integral += weights[i] * u[i];
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = ps[i] * integral;
    return v;
}

std::vector<double> ProjectionPair::apply_q(std::span<const double> u) const {
    std::vector<double> v = apply_p(u);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - v[i];
    return v;
}

ProjectionPair build_projections(const StationaryDensity& ps, const Discretization& disc) {
    ProjectionPair pq;
    pq.ps = ps.values;
    const std::size_t n = ps.values.size();
    pq.weights.assign(n, ps.dx);
    pq.weights.front() *= 0.5;
    pq.weights.back() *= 0.5;
    (void)disc;
    return pq;
}

} // namespace fpe
