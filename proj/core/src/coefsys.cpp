#include "fpe/coefsys.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fpe {

CoefficientState zero_state(int J, int ny) {
    CoefficientState s;
    s.a.assign(std::size_t(J) + 1, std::vector<double>(std::size_t(ny), 0.0));
    return s;
}

namespace {

/// Conservative divergence of the face flux T_face * (a_left + a_right)/2
/// with Dirichlet zero ghosts; face coefficients are node averages and the
/// one-sided node value at the two boundary faces.
void add_transport(std::span<const double> Tnode, std::span<const double> a, double dy,
                   std::span<double> out) {
    const std::size_t n = a.size();
    double flux_prev; // face between ghost(-R) and node 0
    flux_prev = Tnode[0] * 0.5 * a[0];
    for (std::size_t i = 0; i < n; ++i) {
        double flux_next;
        if (i + 1 < n) {
            const double tf = 0.5 * (Tnode[i] + Tnode[i + 1]);
            flux_next = tf * 0.5 * (a[i] + a[i + 1]);
        } else {
            flux_next = Tnode[n - 1] * 0.5 * a[n - 1];
        }
        out[i] -= (flux_next - flux_prev) / dy;
        flux_prev = flux_next;
    }
}

/// Adjoint of add_transport with respect to the unweighted grid sum.
/// Face m (0..n) enters out[m] with +1/dy and out[m-1] with -1/dy, so the
/// adjoint scatters w_m = (v_m - v_{m-1})/dy back through the face averages.
void add_transport_adjoint(std::span<const double> Tnode, std::span<const double> v, double dy,
                           std::span<double> out) {
    const std::size_t n = v.size();
    out[0] += (v[0] / dy) * Tnode[0] * 0.5;
    for (std::size_t m = 1; m < n; ++m) {
        const double w = (v[m] - v[m - 1]) / dy;
        const double tf = 0.5 * (Tnode[m - 1] + Tnode[m]);
        out[m - 1] += w * tf * 0.5;
        out[m] += w * tf * 0.5;
    }
    out[n - 1] += (-v[n - 1] / dy) * Tnode[n - 1] * 0.5;
}

} // namespace

std::vector<double> TruncatedSystem::coupling_row(int row,
                                                  const std::vector<std::vector<double>>& a) const {
    std::vector<double> r(std::size_t(ny), 0.0);
    for (int k = 0; k <= J; ++k) {
        if (!active[std::size_t(row)][std::size_t(k)]) continue;
        add_transport(T[std::size_t(row)][std::size_t(k)], a[std::size_t(k)], dy, r);
        const auto& rx = Rx[std::size_t(row)][std::size_t(k)];
        const auto& ak = a[std::size_t(k)];
        for (int i = 0; i < ny; ++i) r[std::size_t(i)] += rx[std::size_t(i)] * ak[std::size_t(i)];
    }
    return r;
}

std::vector<std::vector<double>> TruncatedSystem::coupling_rates(
    const std::vector<std::vector<double>>& a) const {
    std::vector<std::vector<double>> out(std::size_t(J) + 1);
    for (int j = 0; j <= J; ++j) out[std::size_t(j)] = coupling_row(j, a);
    return out;
}

std::vector<std::vector<double>> TruncatedSystem::coupling_row_adjoint(
    int row, std::span<const double> v) const {
    std::vector<std::vector<double>> out(std::size_t(J) + 1,
                                         std::vector<double>(std::size_t(ny), 0.0));
    for (int k = 0; k <= J; ++k) {
        if (!active[std::size_t(row)][std::size_t(k)]) continue;
        add_transport_adjoint(T[std::size_t(row)][std::size_t(k)], v, dy, out[std::size_t(k)]);
        const auto& rx = Rx[std::size_t(row)][std::size_t(k)];
        for (int i = 0; i < ny; ++i)
            out[std::size_t(k)][std::size_t(i)] += rx[std::size_t(i)] * v[std::size_t(i)];
    }
    return out;
}

double TruncatedSystem::max_face_speed() const {
    double m = 0.0;
    for (const auto& row : T)
        for (const auto& src : row)
            for (double v : src) m = std::max(m, std::abs(v));
    return m;
}

TruncatedSystem assemble(const CouplingTensors& c, const SdeModel& model,
                         const Discretization& disc, int J) {
    if (J > c.J) throw Error("assemble: coupling tensors cover fewer modes than requested");
    TruncatedSystem sys;
    sys.J = J;
    sys.ny = disc.ny;
    sys.epsilon = model.epsilon;
    sys.R = model.R;
    sys.dy = 2.0 * model.R / double(disc.ny + 1);
    sys.diff = 0.5 * model.sigma2 * model.sigma2;
    sys.ygrid = interior_grid(model.R, std::size_t(disc.ny));
    sys.lambdas.assign(c.lambdas.begin(), c.lambdas.begin() + J + 1);
    sys.lambdas[0] = 0.0; // the j = 0 row never relaxes

    const std::size_t ny = std::size_t(disc.ny);
    if (c.ygrid.size() != ny)
        throw GridMismatchError("assemble: coupling tensors sampled on a different y grid");

    sys.T.assign(std::size_t(J) + 1,
                 std::vector<std::vector<double>>(std::size_t(J) + 1,
                                                  std::vector<double>(ny, 0.0)));
    sys.Rx = sys.T;
    sys.active.assign(std::size_t(J) + 1, std::vector<bool>(std::size_t(J) + 1, false));

    // slow row: -d_y((G_k/C0) a_k)
    for (int k = 0; k <= J; ++k)
        for (std::size_t i = 0; i < ny; ++i)
            sys.T[0][std::size_t(k)][i] = c.G[std::size_t(k)][i] / c.C0;
    // fast rows: -d_y((G_{k,j}/C_jj) a_k) + (Gtil_{k,j}/C_jj) a_k
    for (int j = 1; j <= J; ++j) {
        const double nj = c.norms[std::size_t(j)];
        for (int k = 0; k <= J; ++k)
            for (std::size_t i = 0; i < ny; ++i) {
                sys.T[std::size_t(j)][std::size_t(k)][i] =
                    c.Gkj[std::size_t(k)][std::size_t(j - 1)][i] / nj;
                sys.Rx[std::size_t(j)][std::size_t(k)][i] =
                    c.Gtil[std::size_t(k)][std::size_t(j - 1)][i] / nj;
            }
    }
    for (int j = 0; j <= J; ++j)
        for (int k = 0; k <= J; ++k) {
            bool any = false;
            for (std::size_t i = 0; i < ny && !any; ++i)
                any = sys.T[std::size_t(j)][std::size_t(k)][i] != 0.0 ||
                      sys.Rx[std::size_t(j)][std::size_t(k)][i] != 0.0;
            sys.active[std::size_t(j)][std::size_t(k)] = any;
        }
    return sys;
}

CoefficientState step(const TruncatedSystem& sys, const CoefficientState& state, double dt) {
    if (!(dt > 0.0)) throw Error("step: dt must be positive");
    const std::size_t ny = std::size_t(sys.ny);
    CoefficientState next;
    next.t = state.t + dt;
    next.a.resize(std::size_t(sys.J) + 1);

    const auto rates = sys.coupling_rates(state.a);
    const double r = sys.diff * dt / (sys.dy * sys.dy);
    std::vector<double> lower(ny - 1, -r), upper(ny - 1, -r), diag(ny), rhs(ny);
    for (int j = 0; j <= sys.J; ++j) {
        const double shift = dt * sys.lambdas[std::size_t(j)] / sys.epsilon;
        for (std::size_t i = 0; i < ny; ++i) {
            diag[i] = 1.0 + 2.0 * r + shift;
            rhs[i] = state.a[std::size_t(j)][i] + dt * rates[std::size_t(j)][i];
        }
        next.a[std::size_t(j)] = solve_tridiagonal(lower, diag, upper, rhs);
        for (double v : next.a[std::size_t(j)])
            if (!std::isfinite(v) || std::abs(v) > kBlowupCap)
                throw StepUnstableError("step: state exceeded blow-up cap; reduce dt");
    }
    return next;
}

double default_dt(const TruncatedSystem& sys) {
    const double speed = sys.max_face_speed();
    double dt = 0.1 * sys.epsilon;
    if (speed > 0.0) dt = std::min(dt, 0.25 * sys.dy / speed);
    return dt;
}

NormSeries integrate(const TruncatedSystem& sys, CoefficientState& state, double T, double dt,
                     int observe_stride, const StateObserver& observer) {
    if (!(T > 0.0)) throw Error("integrate: T must be positive");
    if (!(dt > 0.0)) dt = default_dt(sys);
    NormSeries series;
    auto record = [&](const CoefficientState& s) {
        series.t.push_back(s.t);
        std::vector<double> l2(std::size_t(sys.J) + 1), h2(std::size_t(sys.J) + 1);
        for (int j = 0; j <= sys.J; ++j) {
            l2[std::size_t(j)] = norm_l2(s.a[std::size_t(j)], sys.dy);
            h2[std::size_t(j)] = norm_h2(s.a[std::size_t(j)], sys.dy);
        }
        series.l2.push_back(std::move(l2));
        series.h2.push_back(std::move(h2));
        if (observer) observer(s);
    };

    record(state);
    const long nsteps = std::lround(std::ceil(T / dt - 1e-12));
    for (long n = 0; n < nsteps; ++n) {
        state = step(sys, state, dt);
        if ((n + 1) % observe_stride == 0 || n + 1 == nsteps) record(state);
    }
    return series;
}

} // namespace fpe
