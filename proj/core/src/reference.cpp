#include "fpe/reference.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/l1_operator.hpp"
#include "fpe/linalg.hpp"
#include "fpe/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fpe {

namespace rng {

double normal_from_uniform(double p) {
    // Acklam's inverse normal CDF
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley step against the exact CDF
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace rng

namespace {

struct SignedMass {
    double total = 0.0;
    double negative = 0.0; // magnitude of the negative part
};

SignedMass grid_mass(const std::vector<std::vector<double>>& rho, double dx, double dy) {
    SignedMass m;
    const std::size_t nx = rho.size(), ny = rho.empty() ? 0 : rho[0].size();
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double wx = (ix == 0 || ix + 1 == nx) ? 0.5 : 1.0;
        for (std::size_t iy = 0; iy < ny; ++iy) {
            m.total += wx * rho[ix][iy];
            if (rho[ix][iy] < 0.0) m.negative -= wx * rho[ix][iy];
        }
    }
    m.total *= dx * dy;
    m.negative *= dx * dy;
    return m;
}

} // namespace

FullFpeState solve_full_fpe(const SdeModel& model, const Discretization& disc,
                            const DensityField& rho0, double T, double dt,
                            const FullObserver& observer, int observe_stride) {
    const std::size_t nx = std::size_t(disc.nx);
    const std::size_t ny = std::size_t(disc.ny);
    if (rho0.values.size() != nx || (nx && rho0.values[0].size() != ny))
        throw GridMismatchError("solve_full_fpe: rho0 grid mismatch");
    const double dx = 2.0 * disc.X / double(disc.nx - 1);
    const double dy = 2.0 * model.R / double(disc.ny + 1);
    const auto xs = linspace(-disc.X, disc.X, nx);
    const auto ys = interior_grid(model.R, ny);
    const double nu_y = 0.5 * model.sigma2 * model.sigma2;

    // transport CFL on g plus a fraction of the fast time scale
    if (!(dt > 0.0)) {
        double gmax = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
                gmax = std::max(gmax, std::abs(model.g(xs[ix], ys[iy])));
        dt = std::min(0.25 * dy / std::max(gmax, 1e-12), 0.5 * model.epsilon);
    }

    // per-column fast operators (y-dependent through f)
    std::vector<L1Operator> l1(ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        Discretization dcol = disc;
        l1[iy] = build_l1_operator(model, ys[iy], dcol);
    }
    // g sampled at y faces per x row for the conservative transport
    std::vector<std::vector<double>> gface(nx, std::vector<double>(ny + 1, 0.0));
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t m = 0; m <= ny; ++m) {
            const double yf = -model.R + (double(m) + 0.5) * dy;
            gface[ix][m] = model.g(xs[ix], yf);
        }

    FullFpeState s;
    s.t = rho0.t;
    s.rho = rho0.values;
    SignedMass prev_mass = grid_mass(s.rho, dx, dy);
    const double mass_scale = std::max(prev_mass.total, 1e-12);

    const long nsteps = std::lround(std::ceil(T / dt - 1e-12));
    if (observer) observer(s.t, s);

    std::vector<double> col(ny), colx(nx), rhs(nx);
    std::vector<double> ylower(ny - 1, 0.0), ydiag(ny, 0.0), yupper(ny - 1, 0.0);
    const double ry = nu_y * dt / (dy * dy);
    for (std::size_t i = 0; i < ny; ++i) ydiag[i] = 1.0 + 2.0 * ry;
    for (std::size_t i = 0; i + 1 < ny; ++i) { ylower[i] = -ry; yupper[i] = -ry; }

    for (long n = 0; n < nsteps; ++n) {
        // explicit conservative y transport: rho -= dt * d_y(g rho); the two
        // wall faces are outflow-only (nothing lives beyond an absorbing
        // boundary, so transport may remove mass there but never add it)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            auto& row = s.rho[ix];
            double flux_prev = std::min(gface[ix][0], 0.0) * row[0];
            for (std::size_t iy = 0; iy < ny; ++iy) {
                double flux_next;
                if (iy + 1 < ny)
                    flux_next = gface[ix][iy + 1] * 0.5 * (row[iy] + row[iy + 1]);
                else
                    flux_next = std::max(gface[ix][ny], 0.0) * row[ny - 1];
                col[iy] = row[iy] - dt * (flux_next - flux_prev) / dy;
                flux_prev = flux_next;
            }
            for (std::size_t iy = 0; iy < ny; ++iy) row[iy] = col[iy];
        }
        // implicit x sweep: (I - dt/eps L1) rho* = rho per column
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const L1Operator& op = l1[iy];
            std::vector<double> lower(nx - 1), diag(nx), upper(nx - 1);
            const double cdt = dt / model.epsilon;
            for (std::size_t i = 0; i < nx; ++i) diag[i] = 1.0 - cdt * op.diag[i];
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                lower[i] = -cdt * op.lower[i];
                upper[i] = -cdt * op.upper[i];
            }
            for (std::size_t ix = 0; ix < nx; ++ix) rhs[ix] = s.rho[ix][iy];
            colx = solve_tridiagonal(lower, diag, upper, rhs);
            for (std::size_t ix = 0; ix < nx; ++ix) s.rho[ix][iy] = colx[ix];
        }
        // implicit y diffusion per row
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t iy = 0; iy < ny; ++iy) col[iy] = s.rho[ix][iy];
            const std::vector<double> sol = solve_tridiagonal(ylower, ydiag, yupper, col);
            for (std::size_t iy = 0; iy < ny; ++iy) s.rho[ix][iy] = sol[iy];
        }
        s.t += dt;

        for (const auto& row : s.rho)
            for (double v : row)
                if (!std::isfinite(v) || std::abs(v) > kBlowupCap)
                    throw StepUnstableError("solve_full_fpe: state blew up; reduce dt");
        const SignedMass mass = grid_mass(s.rho, dx, dy);
        // absorbing a negative lobe (band-limited data undershoots) raises
        // the signed total legitimately, by at most the lobe's shrinkage
        const double neg_credit = std::max(0.0, prev_mass.negative - mass.negative);
        if (mass.total > prev_mass.total + neg_credit + 1e-8 * mass_scale)
            throw MassAnomalyError("solve_full_fpe: mass increased between steps");
        prev_mass = mass;
        if (observer && ((n + 1) % observe_stride == 0 || n + 1 == nsteps)) observer(s.t, s);
    }
    return s;
}

DensityField full_state_to_density(const FullFpeState& s, const SdeModel& model,
                                   const Discretization& disc) {
    DensityField d;
    d.t = s.t;
    d.x = linspace(-disc.X, disc.X, std::size_t(disc.nx));
    d.y = interior_grid(model.R, std::size_t(disc.ny));
    d.values = s.rho;
    return d;
}

McResult euler_maruyama(const SdeModel& model, const Discretization& disc,
                        std::int64_t n_paths, double T, double dt_sde, std::uint64_t seed,
                        const std::function<std::pair<double, double>(std::uint64_t)>& init,
                        std::span<const double> snapshot_times) {
    if (!(dt_sde > 0.0)) throw Error("euler_maruyama: dt_sde must be positive");
    if (dt_sde > model.epsilon / 10.0 + 1e-15)
        throw Error("euler_maruyama: dt_sde must not exceed epsilon/10");
    const double sx = model.sigma1 / std::sqrt(model.epsilon);
    const double inv_eps = 1.0 / model.epsilon;
    const double sq_dt = std::sqrt(dt_sde);

    McResult out;
    out.ensemble.n_paths = n_paths;
    out.ensemble.seed = seed;
    out.ensemble.dt_sde = dt_sde;

    const long nsteps = std::lround(std::ceil(T / dt_sde - 1e-12));
    std::vector<long> snap_steps;
    for (double ts : snapshot_times)
        snap_steps.push_back(std::min<long>(nsteps, std::lround(ts / dt_sde)));

    const std::size_t nxc = std::size_t(disc.nx) - 1; // histogram cells
    const std::size_t nyc = std::size_t(disc.ny) + 1;
    const double dxc = 2.0 * disc.X / double(nxc);
    const double dyc = 2.0 * model.R / double(nyc);
    for (double ts : snapshot_times) {
        McHistogram h;
        h.t = ts;
        h.x_edges = linspace(-disc.X, disc.X, nxc + 1);
        h.y_edges = linspace(-model.R, model.R, nyc + 1);
        h.density.assign(nxc, std::vector<double>(nyc, 0.0));
        out.histograms.push_back(std::move(h));
    }

    std::vector<double>& xs = out.ensemble.x;
    std::vector<double>& ys = out.ensemble.y;
    xs.reserve(std::size_t(n_paths));
    ys.reserve(std::size_t(n_paths));

    for (std::int64_t p = 0; p < n_paths; ++p) {
        auto [x, y] = init(std::uint64_t(p));
        bool alive = std::abs(y) < model.R;
        long next_snap = 0;
        for (long n = 0; n < nsteps && alive; ++n) {
            while (next_snap < long(snap_steps.size()) && snap_steps[next_snap] == n) {
                auto& h = out.histograms[std::size_t(next_snap)];
                const long cx = long(std::floor((x + disc.X) / dxc));
                const long cy = long(std::floor((y + model.R) / dyc));
                if (cx >= 0 && cx < long(nxc) && cy >= 0 && cy < long(nyc))
                    h.density[std::size_t(cx)][std::size_t(cy)] += 1.0;
                ++next_snap;
            }
            const double w1 = rng::standard_normal(seed, std::uint64_t(p), std::uint64_t(n), 0);
            const double w2 = rng::standard_normal(seed, std::uint64_t(p), std::uint64_t(n), 1);
            const double xn = x + inv_eps * model.f(x, y) * dt_sde + sx * sq_dt * w1;
            const double yn = y + model.g(x, y) * dt_sde + model.sigma2 * sq_dt * w2;
            x = xn;
            y = yn;
            if (std::abs(y) >= model.R) alive = false; // absorbed, stays absorbed
        }
        while (alive && next_snap < long(snap_steps.size())) {
            if (snap_steps[next_snap] <= nsteps) {
                auto& h = out.histograms[std::size_t(next_snap)];
                const long cx = long(std::floor((x + disc.X) / dxc));
                const long cy = long(std::floor((y + model.R) / dyc));
                if (cx >= 0 && cx < long(nxc) && cy >= 0 && cy < long(nyc))
                    h.density[std::size_t(cx)][std::size_t(cy)] += 1.0;
            }
            ++next_snap;
        }
        if (alive) {
            xs.push_back(x);
            ys.push_back(y);
        } else {
            ++out.ensemble.absorbed;
        }
    }
    out.ensemble.t = double(nsteps) * dt_sde;

    const double cell = dxc * dyc;
    for (auto& h : out.histograms)
        for (auto& col : h.density)
            for (double& v : col) v /= double(n_paths) * cell;
    return out;
}

DensityField histogram_to_density(const McHistogram& h) {
    DensityField d;
    d.t = h.t;
    const std::size_t nxc = h.density.size();
    const std::size_t nyc = h.density.empty() ? 0 : h.density[0].size();
    d.x.resize(nxc);
    d.y.resize(nyc);
    for (std::size_t i = 0; i < nxc; ++i) d.x[i] = 0.5 * (h.x_edges[i] + h.x_edges[i + 1]);
    for (std::size_t i = 0; i < nyc; ++i) d.y[i] = 0.5 * (h.y_edges[i] + h.y_edges[i + 1]);
    d.values = h.density;
    return d;
}

DensityField density_to_cells(const DensityField& d) {
    DensityField c;
    c.t = d.t;
    const std::size_t nxc = d.x.size() - 1;
    const std::size_t nyc = d.y.size() + 1;
    c.x.resize(nxc);
    c.values.assign(nxc, std::vector<double>(nyc, 0.0));
    for (std::size_t i = 0; i < nxc; ++i) c.x[i] = 0.5 * (d.x[i] + d.x[i + 1]);
    // y nodes are interior; cells straddle node midpoints with zero boundary
    const double dy = d.y.size() > 1 ? d.y[1] - d.y[0] : 1.0;
    c.y.resize(nyc);
    for (std::size_t m = 0; m < nyc; ++m) c.y[m] = d.y.front() - 0.5 * dy + double(m) * dy;
    for (std::size_t i = 0; i < nxc; ++i)
        for (std::size_t m = 0; m < nyc; ++m) {
            const double left_lo = (m == 0) ? 0.0 : d.values[i][m - 1];
            const double left_hi = (m == nyc - 1) ? 0.0 : d.values[i][m];
            const double right_lo = (m == 0) ? 0.0 : d.values[i + 1][m - 1];
            const double right_hi = (m == nyc - 1) ? 0.0 : d.values[i + 1][m];
            c.values[i][m] = 0.25 * (left_lo + left_hi + right_lo + right_hi);
        }
    return c;
}

ReductionErrors compare_reduction(const std::vector<DensityField>& full,
                                  const std::vector<CoefficientState>& coef,
                                  const EigenBasis& basis, const Discretization& disc,
                                  double R) {
    if (full.size() != coef.size())
        throw GridMismatchError("compare_reduction: snapshot counts differ");
    ReductionErrors out;
    for (std::size_t s = 0; s < full.size(); ++s) {
        const DensityField rec = reconstruct_density(coef[s], basis, disc, R);
        out.t.push_back(full[s].t);
        out.density.push_back(density_error(full[s], rec));
        const std::vector<double> mf = density_marginal(full[s]);
        const std::vector<double> mr = density_marginal(rec);
        const double dy = full[s].y.size() > 1 ? full[s].y[1] - full[s].y[0] : 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < mf.size(); ++i)
            acc += (mf[i] - mr[i]) * (mf[i] - mr[i]);
        out.marginal_l2.push_back(std::sqrt(acc * dy));
    }
    return out;
}

} // namespace fpe
