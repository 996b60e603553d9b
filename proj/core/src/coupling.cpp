#include "fpe/coupling.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"

#include <cmath>
#include <numbers>

namespace fpe {

namespace {

struct TensorsAtY {
    std::vector<double> G;                   // j = 0..J
    std::vector<std::vector<double>> Gkj;    // [k][j-1]
    std::vector<std::vector<double>> Gtil;   // [k][j-1]
};

TensorsAtY tensors_at(const EigenBasis& basis, const SdeModel& model, double y,
                      int J, int quad_nodes) {
    TensorsAtY out;
    out.G.assign(std::size_t(J) + 1, 0.0);
    out.Gkj.assign(std::size_t(J) + 1, std::vector<double>(std::size_t(J), 0.0));
    out.Gtil.assign(std::size_t(J) + 1, std::vector<double>(std::size_t(J), 0.0));

    const int jmax = J + 1; // Gtil pairs against modes up to J+1
    auto g_at = [&model, y](double x) { return model.g(x, y); };

    std::vector<double> l2(std::size_t(jmax) + 1);
    for (int m = 0; m <= jmax; ++m) l2[std::size_t(m)] = basis.l2_norm_squared(m);

    // dual expansions of g*phi_k for every source mode
    std::vector<std::vector<double>> cu(std::size_t(J) + 1);
    if (basis.source() == BasisSource::HermiteAnalytic) {
        for (int k = 0; k <= J; ++k) {
            auto u = [&basis, &g_at, k, y](double x) { return g_at(x) * basis.eval(k, y, x); };
            cu[std::size_t(k)] = basis.dual_coefficients(y, u, jmax, quad_nodes);
            out.G[std::size_t(k)] = basis.integrate_against(k, y, g_at, quad_nodes);
        }
        // d_y phi_j = (a'(y)/(beta sqrt(2))) phi_{j+1} on the analytic path
        const double shift = basis.dcenter(y) / (basis.scale_beta() * std::numbers::sqrt2);
        for (int k = 0; k <= J; ++k)
            for (int j = 1; j <= J; ++j) {
                out.Gkj[std::size_t(k)][std::size_t(j - 1)] =
                    l2[std::size_t(j)] * cu[std::size_t(k)][std::size_t(j)];
                out.Gtil[std::size_t(k)][std::size_t(j - 1)] =
                    shift * l2[std::size_t(j + 1)] * cu[std::size_t(k)][std::size_t(j + 1)];
            }
        return out;
    }

    // numeric path: everything on the solve grid
    const EigenSolveAtY& s = basis.solve_at(y);
    const std::size_t n = s.x.size();
    std::vector<double> gv(n);
    for (std::size_t i = 0; i < n; ++i) gv[i] = g_at(s.x[i]);
    for (int k = 0; k <= J; ++k) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = gv[i] * s.phi[std::size_t(k)][i];
        cu[std::size_t(k)] = basis.dual_coefficients_grid(y, u, jmax);
        out.G[std::size_t(k)] = trapezoid(u, s.dx);
    }
    // dual expansions of d_y phi_j via the basis parameter derivative
    std::vector<std::vector<double>> dv(std::size_t(J) + 1);
    for (int j = 1; j <= J; ++j) {
        std::vector<double> dphi(n);
        for (std::size_t i = 0; i < n; ++i) dphi[i] = basis.eval_dy(j, y, s.x[i]);
        dv[std::size_t(j)] = basis.dual_coefficients_grid(y, dphi, jmax);
    }
    for (int k = 0; k <= J; ++k)
        for (int j = 1; j <= J; ++j) {
            out.Gkj[std::size_t(k)][std::size_t(j - 1)] =
                l2[std::size_t(j)] * cu[std::size_t(k)][std::size_t(j)];
            double acc = 0.0;
            for (int m = 0; m <= jmax; ++m)
                acc += cu[std::size_t(k)][std::size_t(m)] * dv[std::size_t(j)][std::size_t(m)] *
                       l2[std::size_t(m)];
            out.Gtil[std::size_t(k)][std::size_t(j - 1)] = acc;
        }
    return out;
}

/// Refinement distance in assembled-row units: every fast-row tensor is
/// divided by its row normalizer C_jj, which is how it enters the dynamics.
/// Comparing raw entries would amplify benign roundoff in the dual
/// coefficients by the rapidly growing norm constants.
double max_rel_diff(const TensorsAtY& a, const TensorsAtY& b, const EigenBasis& basis,
                    double c0) {
    double worst = 0.0;
    auto upd = [&worst](double x, double y) {
        worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
    };
    for (std::size_t j = 0; j < a.G.size(); ++j) upd(a.G[j] / c0, b.G[j] / c0);
    for (std::size_t k = 0; k < a.Gkj.size(); ++k)
        for (std::size_t j = 0; j < a.Gkj[k].size(); ++j) {
            const double nj = basis.norms()[j + 1];
            upd(a.Gkj[k][j] / nj, b.Gkj[k][j] / nj);
            upd(a.Gtil[k][j] / nj, b.Gtil[k][j] / nj);
        }
    return worst;
}

} // namespace

CouplingTensors compute_coupling(const EigenBasis& basis, const SdeModel& model,
                                 std::span<const double> ygrid, const Discretization& disc) {
    const int J = basis.levels();
    CouplingTensors t;
    t.J = J;
    t.ygrid.assign(ygrid.begin(), ygrid.end());
    t.C0 = basis.mode_mass(0, ygrid.empty() ? 0.0 : ygrid[ygrid.size() / 2], disc.quad_nodes);
    if (!(t.C0 > 0.0)) throw Error("compute_coupling: C0 must be positive");
    t.norms.assign(basis.norms().begin(), basis.norms().begin() + J + 1);
    t.lambdas.assign(basis.lambdas().begin(), basis.lambdas().begin() + J + 1);

    const std::size_t ny = ygrid.size();
    t.G.assign(std::size_t(J) + 1, std::vector<double>(ny, 0.0));
    t.Gkj.assign(std::size_t(J) + 1,
                 std::vector<std::vector<double>>(std::size_t(J), std::vector<double>(ny, 0.0)));
    t.Gtil = t.Gkj;

    const bool hermite = basis.source() == BasisSource::HermiteAnalytic;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        TensorsAtY a = tensors_at(basis, model, ygrid[iy], J, disc.quad_nodes);
        if (hermite) {
            // node-count refinement guard on the quadrature path
            TensorsAtY b = tensors_at(basis, model, ygrid[iy], J, 2 * disc.quad_nodes);
            if (max_rel_diff(a, b, basis, t.C0) > 1e-6)
                throw QuadratureDivergenceError(
                    "compute_coupling: quadrature not converged at y=" +
                    std::to_string(ygrid[iy]) + "; raise quad_nodes");
        }
        for (int j = 0; j <= J; ++j) t.G[std::size_t(j)][iy] = a.G[std::size_t(j)];
        for (int k = 0; k <= J; ++k)
            for (int j = 1; j <= J; ++j) {
                t.Gkj[std::size_t(k)][std::size_t(j - 1)][iy] =
                    a.Gkj[std::size_t(k)][std::size_t(j - 1)];
                t.Gtil[std::size_t(k)][std::size_t(j - 1)][iy] =
                    a.Gtil[std::size_t(k)][std::size_t(j - 1)];
            }
        for (int j = 0; j <= J; ++j)
            if (!std::isfinite(t.G[std::size_t(j)][iy]))
                throw Error("compute_coupling: non-finite tensor sample");
        for (int k = 0; k <= J; ++k)
            for (int j = 1; j <= J; ++j)
                if (!std::isfinite(t.Gkj[std::size_t(k)][std::size_t(j - 1)][iy]) ||
                    !std::isfinite(t.Gtil[std::size_t(k)][std::size_t(j - 1)][iy]))
                    throw Error("compute_coupling: non-finite tensor sample");
    }
    return t;
}

} // namespace fpe
