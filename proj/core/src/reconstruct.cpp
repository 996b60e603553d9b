#include "fpe/reconstruct.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"

#include <cmath>

namespace fpe {

DensityField reconstruct_density(const CoefficientState& state, const EigenBasis& basis,
                                 const Discretization& disc, double R) {
    DensityField d;
    d.t = state.t;
    d.x = linspace(-disc.X, disc.X, std::size_t(disc.nx));
    const int J = int(state.a.size()) - 1;
    const std::size_t ny = state.a.empty() ? 0 : state.a[0].size();
    d.y = interior_grid(R, ny);
    d.values.assign(d.x.size(), std::vector<double>(ny, 0.0));
    // basis evaluations cached per (j, y) row
    std::vector<double> column(d.x.size());
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = d.y[iy];
        for (int j = 0; j <= J; ++j) {
            const double aj = state.a[std::size_t(j)][iy];
            if (aj == 0.0) continue;
            for (std::size_t ix = 0; ix < d.x.size(); ++ix)
                d.values[ix][iy] += aj * basis.eval(j, y, d.x[ix]);
        }
    }
    return d;
}

CoefficientState decompose_density(const std::function<double(double, double)>& rho0,
                                   const EigenBasis& basis, const Discretization& disc,
                                   double R, int J) {
    CoefficientState s = zero_state(J, disc.ny);
    const auto ygrid = interior_grid(R, std::size_t(disc.ny));
    for (std::size_t iy = 0; iy < ygrid.size(); ++iy) {
        const double y = ygrid[iy];
        auto slice = [&rho0, y](double x) { return rho0(x, y); };
        const std::vector<double> c = basis.dual_coefficients(y, slice, J, disc.quad_nodes);
        for (int j = 0; j <= J; ++j) s.a[std::size_t(j)][iy] = c[std::size_t(j)];
    }
    return s;
}

CoefficientState decompose_density(const DensityField& rho0, const EigenBasis& basis,
                                   const Discretization& disc, int J) {
    CoefficientState s = zero_state(J, int(rho0.y.size()));
    const double x0 = rho0.x.front();
    const double dx = rho0.x.size() > 1 ? rho0.x[1] - rho0.x[0] : 1.0;
    std::vector<double> slice(rho0.x.size());
    for (std::size_t iy = 0; iy < rho0.y.size(); ++iy) {
        for (std::size_t ix = 0; ix < rho0.x.size(); ++ix) slice[ix] = rho0.values[ix][iy];
        auto fn = [&](double x) {
            if (x < rho0.x.front() || x > rho0.x.back()) return 0.0;
            return interp_cubic(slice, x0, dx, x);
        };
        const std::vector<double> c =
            basis.dual_coefficients(rho0.y[iy], fn, J, disc.quad_nodes);
        for (int j = 0; j <= J; ++j) s.a[std::size_t(j)][iy] = c[std::size_t(j)];
    }
    s.t = rho0.t;
    return s;
}

DensityError density_error(const DensityField& a, const DensityField& b) {
    if (a.x.size() != b.x.size() || a.y.size() != b.y.size())
        throw GridMismatchError("density_error: grids differ");
    const double dx = a.x.size() > 1 ? a.x[1] - a.x[0] : 1.0;
    const double dy = a.y.size() > 1 ? a.y[1] - a.y[0] : 1.0;
    DensityError e;
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t ix = 0; ix < a.x.size(); ++ix) {
        const double wx = (ix == 0 || ix + 1 == a.x.size()) ? 0.5 : 1.0;
        for (std::size_t iy = 0; iy < a.y.size(); ++iy) {
            const double diff = a.values[ix][iy] - b.values[ix][iy];
            l1 += wx * std::abs(diff);
            l2 += wx * diff * diff;
            e.linf = std::max(e.linf, std::abs(diff));
        }
    }
    e.l1 = l1 * dx * dy;
    e.l2 = std::sqrt(l2 * dx * dy);
    return e;
}

double density_mass(const DensityField& d) {
    const double dx = d.x.size() > 1 ? d.x[1] - d.x[0] : 1.0;
    const double dy = d.y.size() > 1 ? d.y[1] - d.y[0] : 1.0;
    double m = 0.0;
    for (std::size_t ix = 0; ix < d.x.size(); ++ix) {
        const double wx = (ix == 0 || ix + 1 == d.x.size()) ? 0.5 : 1.0;
        for (std::size_t iy = 0; iy < d.y.size(); ++iy) m += wx * d.values[ix][iy];
    }
    return m * dx * dy;
}

std::vector<double> density_marginal(const DensityField& d) {
    const double dx = d.x.size() > 1 ? d.x[1] - d.x[0] : 1.0;
    std::vector<double> m(d.y.size(), 0.0);
    for (std::size_t iy = 0; iy < d.y.size(); ++iy) {
        double s = 0.5 * (d.values.front()[iy] + d.values.back()[iy]);
        for (std::size_t ix = 1; ix + 1 < d.x.size(); ++ix) s += d.values[ix][iy];
        m[iy] = s * dx;
    }
    return m;
}

} // namespace fpe
