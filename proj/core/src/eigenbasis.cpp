#include "fpe/eigenbasis.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/l1_operator.hpp"
#include "fpe/linalg.hpp"
#include "fpe/quadrature.hpp"
#include "fpe/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fpe {

namespace {

constexpr double kSpectrumTol = 1e-8;

struct AffineFit {
    double tau;
    std::function<double(double)> a;
};

/// f must be x-affine with a y-independent negative slope: f = (a(y) - x)/tau.
AffineFit fit_affine_drift(const SdeModel& model) {
    const double probes_y[] = {0.0, 0.4 * model.R, -0.35 * model.R};
    double slope = 0.0;
    bool first = true;
    for (double y : probes_y) {
        const double f0 = model.f(0.0, y);
        const double fp = model.f(1.0, y);
        const double fm = model.f(-1.0, y);
        const double f2 = model.f(2.0, y);
        const double s = 0.5 * (fp - fm);
        const double curv = fp + fm - 2.0 * f0;
        const double lin_dev = std::abs(f2 - (f0 + 2.0 * s));
        const double scale = std::max({1.0, std::abs(f0), std::abs(fp)});
        if (std::abs(curv) > 1e-9 * scale || lin_dev > 1e-9 * scale)
            throw UnsupportedModelError("hermite_basis: fast drift is not affine in x");
        if (first) { slope = s; first = false; }
        else if (std::abs(s - slope) > 1e-9 * std::max(1.0, std::abs(slope)))
            throw UnsupportedModelError("hermite_basis: fast drift slope depends on y");
    }
    if (!(slope < 0.0))
        throw UnsupportedModelError("hermite_basis: fast drift must be attracting (d_x f < 0)");
    const double tau = -1.0 / slope;
    auto f = model.f;
    return AffineFit{tau, [f, tau](double y) { return tau * f(0.0, y); }};
}

} // namespace

EigenBasis hermite_basis(const SdeModel& model, int J) {
    if (model.kind != DriftKind::OrnsteinUhlenbeck)
        throw UnsupportedModelError("hermite_basis: model is not tagged OrnsteinUhlenbeck");
    if (J < 1) throw Error("hermite_basis: J must be >= 1");
    AffineFit fit = fit_affine_drift(model);

    EigenBasis b;
    b.J_ = J;
    b.source_ = BasisSource::HermiteAnalytic;
    b.model_ = model;
    b.tau_ = fit.tau;
    b.beta_ = model.sigma1 * std::sqrt(fit.tau / 2.0);
    b.a_ = fit.a;
    const int total = J + b.spares_ + 1;
    b.lambdas_.resize(total);
    b.norms_.resize(total);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int n = 0; n < total; ++n) {
        b.lambdas_[n] = double(n) / fit.tau;
        b.norms_[n] = (n == 0) ? b.beta_ * sqrt_pi
                               : b.beta_ * std::sqrt(std::numbers::pi / 2.0) *
                                     odd_factorial(std::size_t(n));
    }
    return b;
}

double EigenBasis::dcenter(double y) const {
    if (!a_) return 0.0;
    const double h = 1e-6 * std::max(1.0, std::abs(y));
    return (a_(y + h) - a_(y - h)) / (2.0 * h);
}

double EigenBasis::eval(int j, double y, double x) const {
    if (source_ == BasisSource::HermiteAnalytic) {
        const double xt = (x - a_(y)) / beta_;
        return std::exp(-0.5 * xt * xt) * hermite_h(std::size_t(j), xt / std::numbers::sqrt2);
    }
    const EigenSolveAtY& s = solve_at(y);
    return interp_cubic(s.phi[std::size_t(j)], s.x.front(), s.dx, x);
}

double EigenBasis::eval_dy(int j, double y, double x) const {
    if (source_ == BasisSource::HermiteAnalytic) {
        // phi depends on y only through x - a(y):
        // d_y phi_j = (a'(y)/(beta sqrt(2))) phi_{j+1}
        return dcenter(y) / (beta_ * std::numbers::sqrt2) * eval(j + 1, y, x);
    }
    const double h = 1e-4 * std::max(1.0, model_.R);
    const EigenSolveAtY& sp = solve_at(y + h);
    const EigenSolveAtY& sm = solve_at(y - h);
    const double up = interp_cubic(sp.phi[std::size_t(j)], sp.x.front(), sp.dx, x);
    const double um = interp_cubic(sm.phi[std::size_t(j)], sm.x.front(), sm.dx, x);
    return (up - um) / (2.0 * h);
}

double EigenBasis::l2_norm_squared(int j) const {
    if (source_ == BasisSource::HermiteAnalytic) {
        // integral phi_j^2 dx = beta sqrt(2) integral H_j^2 e^{-2w^2} dw
        //                    = beta sqrt(pi) (2j-1)!!
        return beta_ * std::sqrt(std::numbers::pi) * odd_factorial(std::size_t(j));
    }
    const EigenSolveAtY& s = solve_at(0.0);
    std::vector<double> sq(s.x.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
        sq[i] = s.phi[std::size_t(j)][i] * s.phi[std::size_t(j)][i];
    return trapezoid(sq, s.dx);
}

std::vector<double> EigenBasis::dual_coefficients(double y,
                                                  const std::function<double(double)>& u,
                                                  int jmax, int quad_nodes) const {
    std::vector<double> c(std::size_t(jmax) + 1, 0.0);
    if (source_ == BasisSource::HermiteAnalytic) {
        // u(x) = sum_j c_j H_j(w) e^{-w^2}, w = (x - a(y))/(beta sqrt(2));
        // c_j recovered by true Hermite orthogonality under e^{-w^2} with the
        // Gauss-Hermite weights re-scaled by e^{+w^2} (envelope stripping).
        const GaussHermite& rule = gauss_hermite_cached(std::size_t(quad_nodes));
        const double sqrt_pi = std::sqrt(std::numbers::pi);
        const double a0 = a_(y);
        std::vector<double> mag(std::size_t(jmax) + 1, 0.0);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double w = rule.nodes[q];
            const double wq = rule.weights[q] * std::exp(w * w);
            const double uval = u(a0 + beta_ * std::numbers::sqrt2 * w);
            if (uval == 0.0) continue;
            const std::vector<double> H = hermite_all(std::size_t(jmax), w);
            for (int j = 0; j <= jmax; ++j) {
                const double term = wq * uval * H[std::size_t(j)];
                c[std::size_t(j)] += term;
                mag[std::size_t(j)] += std::abs(term);
            }
        }
        double fact = 1.0; // 2^j j!
        for (int j = 0; j <= jmax; ++j) {
            // null coefficients cancel terms of size ~sqrt(2^j j!); results
            // below the accumulated roundoff are zero to working precision
            if (std::abs(c[std::size_t(j)]) <=
                32.0 * std::numeric_limits<double>::epsilon() * mag[std::size_t(j)])
                c[std::size_t(j)] = 0.0;
            c[std::size_t(j)] /= sqrt_pi * fact;
            fact *= 2.0 * double(j + 1);
        }
        return c;
    }
    const EigenSolveAtY& s = solve_at(y);
    for (int j = 0; j <= jmax; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.x.size(); ++i) acc += u(s.x[i]) * s.psi[std::size_t(j)][i];
        c[std::size_t(j)] = acc;
    }
    return c;
}

std::vector<double> EigenBasis::dual_coefficients_grid(double y, std::span<const double> u,
                                                       int jmax) const {
    const EigenSolveAtY& s = solve_at(y);
    std::vector<double> c(std::size_t(jmax) + 1, 0.0);
    for (int j = 0; j <= jmax; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.x.size(); ++i) acc += u[i] * s.psi[std::size_t(j)][i];
        c[std::size_t(j)] = acc;
    }
    return c;
}

double EigenBasis::integrate_against(int j, double y, const std::function<double(double)>& u,
                                     int quad_nodes) const {
    if (source_ == BasisSource::HermiteAnalytic) {
        // integral u(x) phi_j^y(x) dx, with phi's own Gaussian as the weight.
        // High-index null integrals cancel terms of size ~sqrt(2^j j!), so
        // results below the accumulated roundoff are clamped to zero.
        const GaussHermite& rule = gauss_hermite_cached(std::size_t(quad_nodes));
        const double a0 = a_(y);
        double acc = 0.0, mag = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double w = rule.nodes[q];
            const double x = a0 + beta_ * std::numbers::sqrt2 * w;
            const double term = rule.weights[q] * u(x) * hermite_h(std::size_t(j), w);
            acc += term;
            mag += std::abs(term);
        }
        if (std::abs(acc) <= 32.0 * std::numeric_limits<double>::epsilon() * mag) acc = 0.0;
        return acc * beta_ * std::numbers::sqrt2;
    }
    const EigenSolveAtY& s = solve_at(y);
    std::vector<double> prod(s.x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) prod[i] = u(s.x[i]) * s.phi[std::size_t(j)][i];
    return trapezoid(prod, s.dx);
}

double EigenBasis::mode_mass(int j, double y, int quad_nodes) const {
    return integrate_against(j, y, [](double) { return 1.0; }, quad_nodes);
}

EigenSolveAtY EigenBasis::solve_numeric(double y) const {
    const L1Operator op = build_l1_operator(model_, y, disc_);
    const std::size_t n = op.diag.size();

    // similarity scaling making the flux-form matrix symmetric; requires the
    // mesh Peclet condition lower*upper > 0 on every face
    std::vector<double> d(n, 1.0), off(n - 1, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double prod = op.lower[i] * op.upper[i];
        if (!(prod > 0.0))
            throw ComplexPairUnsupportedError(
                "numeric_basis: cannot symmetrize L1 (mesh Peclet condition violated); "
                "the discrete spectrum may contain complex pairs — refine nx or shrink X");
        d[i + 1] = d[i] * std::sqrt(op.lower[i] / op.upper[i]);
        off[i] = std::copysign(std::sqrt(prod), op.upper[i]);
    }

    const std::size_t k = std::size_t(J_ + spares_ + 1);
    const std::vector<double> eigs = symtri_largest_eigenvalues(op.diag, off, k);

    EigenSolveAtY s;
    s.y = y;
    s.dx = op.dx;
    s.x = linspace(-disc_.X, disc_.X, n);
    s.weight.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.weight[i] = d[i] * d[i];
    s.lambdas.resize(k);
    s.phi.resize(k);
    s.psi.resize(k);
    for (std::size_t m = 0; m < k; ++m) {
        const double ev = eigs[m]; // descending: m = 0 is the kernel mode
        if (ev > kSpectrumTol)
            throw SpectrumViolationError("numeric_basis: eigenvalue " + std::to_string(ev) +
                                         " has positive real part beyond tolerance");
        s.lambdas[m] = -ev;
        std::vector<double> v = symtri_eigenvector(op.diag, off, ev);
        std::vector<double> phi(n), psi(n);
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] = d[i] * v[i];
            psi[i] = v[i] / d[i];
        }
        double alpha;
        if (m == 0) {
            // kernel mode pinned to the stationary density: unit mass, >= 0
            std::vector<double> w(n, s.dx);
            w.front() *= 0.5;
            w.back() *= 0.5;
            double mass = 0.0;
            for (std::size_t i = 0; i < n; ++i) mass += w[i] * phi[i];
            alpha = 1.0 / mass;
        } else {
            double nrm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) nrm2 += phi[i] * phi[i];
            alpha = 1.0 / std::sqrt(nrm2 * s.dx);
            // sign fixed at the leftmost interior extremum
            const double peak = norm_inf(phi);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double a0 = std::abs(phi[i]);
                if (a0 >= std::abs(phi[i - 1]) && a0 >= std::abs(phi[i + 1]) &&
                    a0 > 0.1 * peak) {
                    if (phi[i] < 0.0) alpha = -alpha;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] *= alpha;
            psi[i] /= alpha; // keep the grid-sum pairing biorthonormal
        }
        s.phi[m] = std::move(phi);
        s.psi[m] = std::move(psi);
    }
    return s;
}

const EigenSolveAtY& EigenBasis::solve_at(double y) const {
    if (source_ != BasisSource::NumericGrid)
        throw Error("EigenBasis::solve_at is only available on the numeric path");
    auto it = cache_.find(y);
    if (it == cache_.end())
        it = cache_.emplace(y, std::make_shared<EigenSolveAtY>(solve_numeric(y))).first;
    return *it->second;
}

EigenBasis numeric_basis(const SdeModel& model, const Discretization& disc, int J) {
    if (J < 1) throw Error("numeric_basis: J must be >= 1");
    EigenBasis b;
    b.J_ = J;
    b.source_ = BasisSource::NumericGrid;
    b.model_ = model;
    b.disc_ = disc;
    const EigenSolveAtY& s0 = b.solve_at(0.0);
    b.lambdas_ = s0.lambdas;
    const int total = J + b.spares_ + 1;
    b.norms_.resize(std::size_t(total));
    for (int j = 0; j < total; ++j) {
        std::vector<double> sq(s0.x.size());
        for (std::size_t i = 0; i < sq.size(); ++i)
            sq[i] = s0.phi[std::size_t(j)][i] * s0.phi[std::size_t(j)][i];
        const double l2sq = trapezoid(sq, s0.dx);
        b.norms_[std::size_t(j)] = (j == 0) ? l2sq : l2sq / std::numbers::sqrt2;
    }
    return b;
}

} // namespace fpe
