#include "fpe/slowmanifold.hpp"
#include <cstdio>
#include <cstdlib>

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"

#include <algorithm>
#include <cmath>

namespace fpe {

ModalState to_modal(const SineTransform& dst, const std::vector<std::vector<double>>& a) {
    ModalState m(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) m[j] = dst.forward(a[j]);
    return m;
}

std::vector<std::vector<double>> from_modal(const SineTransform& dst, const ModalState& m) {
    std::vector<std::vector<double>> a(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) a[j] = dst.inverse(m[j]);
    return a;
}

namespace {

/// phi_k truncated-exponential series / closed forms, stable for all real z.
double phi1(double z) {
    if (std::abs(z) < 0.5) {
        double term = 1.0, sum = 1.0; // sum z^k/(k+1)!
        for (int k = 1; k <= 18; ++k) {
            term *= z / double(k + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}
double phi2(double z) {
    if (std::abs(z) < 0.5) {
        double term = 0.5, sum = 0.5; // sum z^k/(k+2)!
        for (int k = 1; k <= 18; ++k) {
            term *= z / double(k + 2);
            sum += term;
        }
        return sum;
    }
    return (phi1(z) - 1.0) / z;
}
double phi3(double z) {
    if (std::abs(z) < 0.5) {
        double term = 1.0 / 6.0, sum = 1.0 / 6.0; // sum z^k/(k+3)!
        for (int k = 1; k <= 18; ++k) {
            term *= z / double(k + 3);
            sum += term;
        }
        return sum;
    }
    return (phi2(z) - 0.5) / z;
}

/// Exact integrals over one panel of width delta against a decaying kernel:
/// A = int_0^delta e^{-kappa tau} dtau, B = int_0^delta tau e^{-kappa tau} dtau.
struct PanelKernel {
    double E;  // e^{-kappa delta}
    double A;
    double B;
};

PanelKernel panel_kernel(double kappa, double delta) {
    const double z = kappa * delta;
    PanelKernel p;
    p.E = std::exp(-z);
    // A = delta (1 - e^{-z})/z = delta phi1(-z)
    p.A = delta * phi1(-z);
    // B = delta^2 (1 - e^{-z}(1+z))/z^2 = delta^2 sum_m (-z)^m (m+1)/(m+2)!
    if (std::abs(z) < 0.5) {
        double sum = 0.5, pw = 1.0, fact = 2.0;
        for (int m = 1; m <= 18; ++m) {
            pw *= -z;
            fact *= double(m + 2);
            sum += pw * double(m + 1) / fact;
        }
        p.B = delta * delta * sum;
    } else {
        p.B = delta * delta * (1.0 - p.E * (1.0 + z)) / (z * z);
    }
    return p;
}

/// Geometric history mesh on [-T, 0] clustered at 0: returns node times
/// t_0 = -T < ... < t_M = 0.
std::vector<double> history_mesh_base(double T, int M, double tau0) {
    tau0 = std::min(tau0, T / double(M));
    // solve sum_{k=0}^{M-1} tau0 r^k = T for r >= 1
    double lo = 1.0, hi = 2.0;
    auto total = [&](double r) {
        if (std::abs(r - 1.0) < 1e-12) return tau0 * double(M);
        return tau0 * (std::pow(r, M) - 1.0) / (r - 1.0);
    };
    while (total(hi) < T) hi *= 1.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (total(mid) < T) lo = mid;
        else hi = mid;
    }
    const double r = 0.5 * (lo + hi);
    std::vector<double> t(std::size_t(M) + 1);
    t[std::size_t(M)] = 0.0;
    double step = tau0;
    for (int m = M - 1; m >= 0; --m) {
        t[std::size_t(m)] = t[std::size_t(m + 1)] - step;
        step *= r;
    }
    t[0] = -T;
    return t;
}

/// Base mesh with every panel bisected `level` times; exact bisection keeps
/// the piecewise-linear quadrature error scaling by 1/4 per level, which the
/// Richardson combination relies on.
std::vector<double> history_mesh(double T, int M, double tau0, int level) {
    std::vector<double> t = history_mesh_base(T, M, tau0);
    for (int l = 0; l < level; ++l) {
        std::vector<double> fine;
        fine.reserve(2 * t.size());
        for (std::size_t m = 0; m + 1 < t.size(); ++m) {
            fine.push_back(t[m]);
            fine.push_back(0.5 * (t[m] + t[m + 1]));
        }
        fine.push_back(t.back());
        t = std::move(fine);
    }
    return t;
}

double modal_h2_norm(std::span<const double> c, std::span<const double> mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += (1.0 + mu[i] * mu[i]) * c[i] * c[i];
    return std::sqrt(s);
}

} // namespace

namespace {

LpSolution lyapunov_perron_impl(const TruncatedSystem& sys, const SineSplit& split,
                                std::span<const double> vS_modal, const LpOptions& opts,
                                int refine_level) {
    const int J = sys.J;
    const std::size_t ny = std::size_t(sys.ny);
    const int n_slow = split.n_slow;
    if (vS_modal.size() != std::size_t(n_slow))
        throw Error("lyapunov_perron: slow coordinate size mismatch");
    if (n_slow < 1)
        throw Error("lyapunov_perron: splitting leaves no slow modes (k0 = 1)");
    if (std::size_t(split.k0) > ny)
        throw Error("lyapunov_perron: splitting cutoff k0 exceeds the grid mode count; "
                    "refine ny or increase zeta");
    SineTransform dst(ny);

    std::vector<double> mu(ny);
    for (std::size_t i = 0; i < ny; ++i) mu[i] = dst.laplacian_eigenvalue(i + 1, sys.dy);

    // All history fields are stored in exponentially weighted form
    // u_hat(t) = e^{-eta t} u(t), with the weight exponent centered in the
    // physical gap between the slowest retained and fastest split-off sine
    // rates (the midpoint of the split bookkeeping constants). The
    // coupling is linear, so the weighted fields obey the same fixed-point
    // recurrences with every kernel rate shifted by eta, and everything
    // stored stays O(1) over the horizon.
    const double mu_slow_edge = mu[std::size_t(n_slow - 1)];
    const double mu_fast_edge = mu[std::size_t(split.k0 - 1)];
    const double eta = -0.5 * sys.diff * (mu_slow_edge + mu_fast_edge);
    const double lambda_min = sys.J >= 1 ? sys.lambdas[1] : 1.0;
    const double rate_u = lambda_min / sys.epsilon + sys.diff * mu[0] + eta;
    const double rate_vf = sys.diff * mu_fast_edge + eta; // half the cutoff gap
    if (!(rate_u > 0.0) || !(rate_vf > 0.0))
        throw Error("lyapunov_perron: fast relaxation does not dominate the slow group; "
                    "decrease zeta or enlarge the strip");

    const double logtol = std::log(1.0 / opts.tol);
    double T_lp = opts.T_lp;
    if (!(T_lp > 0.0)) T_lp = 1.25 * (logtol / rate_u + logtol / rate_vf);

    const double tau0 =
        std::min({0.2 * sys.epsilon / std::max(lambda_min, 1e-300),
                  0.125 / std::max(sys.diff * mu_slow_edge, 1e-300),
                  T_lp / double(opts.mesh_nodes)});
    const std::vector<double> t = history_mesh(T_lp, opts.mesh_nodes, tau0, refine_level);
    const std::size_t M = t.size() - 1;

    // panel kernels: forward for a_j and the fast part of a_0 (shifted by
    // eta), backward for the slow feedback
    struct Row {
        std::vector<double> E, wL, wR; // per mode
    };
    std::vector<std::vector<Row>> fwd(std::size_t(J) + 1, std::vector<Row>(M));
    std::vector<Row> bwd(M);
    for (std::size_t m = 0; m < M; ++m) {
        const double delta = t[m + 1] - t[m];
        for (int j = 0; j <= J; ++j) {
            Row& r = fwd[std::size_t(j)][m];
            r.E.resize(ny);
            r.wL.resize(ny);
            r.wR.resize(ny);
            for (std::size_t i = 0; i < ny; ++i) {
                const double kap =
                    sys.diff * mu[i] + sys.lambdas[std::size_t(j)] / sys.epsilon + eta;
                const PanelKernel p = panel_kernel(kap, delta);
                r.E[i] = p.E;
                r.wL[i] = p.B / delta;
                r.wR[i] = p.A - p.B / delta;
            }
        }
        Row& rb = bwd[m];
        rb.E.assign(ny, 0.0);
        rb.wL.assign(ny, 0.0);
        rb.wR.assign(ny, 0.0);
        for (int k = 0; k < n_slow; ++k) {
            // weighted backward kernel rate: -diff mu_k - eta >= 0 on Y_S
            const PanelKernel p = panel_kernel(-sys.diff * mu[std::size_t(k)] - eta, delta);
            rb.E[std::size_t(k)] = p.E;
            rb.wL[std::size_t(k)] = p.A - p.B / delta;
            rb.wR[std::size_t(k)] = p.B / delta;
        }
    }

    // weighted free slow history: e^{-(eta + diff mu_k) t} xi_k, bounded on
    // t <= 0 since eta + diff mu_k <= 0 for every slow mode
    std::vector<std::vector<double>> vS_free(M + 1, std::vector<double>(ny, 0.0));
    for (std::size_t m = 0; m <= M; ++m)
        for (int k = 0; k < n_slow; ++k)
            vS_free[m][std::size_t(k)] =
                vS_modal[std::size_t(k)] *
                std::exp(-(eta + sys.diff * mu[std::size_t(k)]) * t[m]);

    // iterated weighted fields, all in sine space
    std::vector<std::vector<std::vector<double>>> u(
        std::size_t(J), std::vector<std::vector<double>>(M + 1, std::vector<double>(ny, 0.0)));
    std::vector<std::vector<double>> vF(M + 1, std::vector<double>(ny, 0.0));
    std::vector<std::vector<double>> W(M + 1, std::vector<double>(ny, 0.0));

    std::vector<std::vector<std::vector<double>>> Fhat(
        std::size_t(J) + 1, std::vector<std::vector<double>>(M + 1));

    LpSolution sol;
    double prev_dist = -1.0;
    int expanding = 0;
    // Picard with adaptive damping: a marginal oscillatory iteration mode
    // (period-2 signature) is stabilized by blending; omega halves on each
    // escalation and the iteration only fails once damping is exhausted.
    double omega = 1.0;
    int expansions_recent = 0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        for (std::size_t m = 0; m <= M; ++m) {
            std::vector<std::vector<double>> modal(std::size_t(J) + 1);
            modal[0] = vS_free[m];
            for (std::size_t i = 0; i < ny; ++i) modal[0][i] += W[m][i] + vF[m][i];
            for (int j = 1; j <= J; ++j) modal[std::size_t(j)] = u[std::size_t(j - 1)][m];
            const auto phys = from_modal(dst, modal);
            const auto rows = sys.coupling_rates(phys);
            for (int j = 0; j <= J; ++j)
                Fhat[std::size_t(j)][m] = dst.forward(rows[std::size_t(j)]);
        }

        double dist = 0.0;
        for (int j = 1; j <= J; ++j) {
            std::vector<double> I(ny, 0.0);
            const auto& F = Fhat[std::size_t(j)];
            for (std::size_t m = 0; m <= M; ++m) {
                if (m > 0) {
                    const Row& r = fwd[std::size_t(j)][m - 1];
                    for (std::size_t i = 0; i < ny; ++i)
                        I[i] = r.E[i] * I[i] + r.wL[i] * F[m - 1][i] + r.wR[i] * F[m][i];
                }
                auto& cur = u[std::size_t(j - 1)][m];
                std::vector<double> diff(ny);
                for (std::size_t i = 0; i < ny; ++i) diff[i] = I[i] - cur[i];
                dist = std::max(dist, modal_h2_norm(diff, mu));
                for (std::size_t i = 0; i < ny; ++i)
                    cur[i] += omega * (I[i] - cur[i]);
                // the recurrence consumes the damped field of earlier nodes
                I = cur;
            }
        }
        {
            std::vector<double> I(ny, 0.0);
            const auto& F = Fhat[0];
            for (std::size_t m = 0; m <= M; ++m) {
                if (m > 0) {
                    const Row& r = fwd[0][m - 1];
                    for (std::size_t i = 0; i < ny; ++i)
                        I[i] = r.E[i] * I[i] + r.wL[i] * F[m - 1][i] + r.wR[i] * F[m][i];
                    for (int k = 0; k < n_slow; ++k) I[std::size_t(k)] = 0.0;
                }
                std::vector<double> diff(ny);
                for (std::size_t i = 0; i < ny; ++i) diff[i] = I[i] - vF[m][i];
                dist = std::max(dist, modal_h2_norm(diff, mu));
                for (std::size_t i = 0; i < ny; ++i)
                    vF[m][i] += omega * (I[i] - vF[m][i]);
                I = vF[m];
            }
        }
        {
            // slow feedback W(t) = int_0^t e^{B(t-s)} pr_S F_0(s) ds by the
            // backward recurrence from W(0) = 0
            std::vector<double> Wm(ny, 0.0);
            const auto& F = Fhat[0];
            for (std::size_t m = M; m-- > 0;) {
                const Row& r = bwd[m];
                std::vector<double> next(ny, 0.0);
                for (int k = 0; k < n_slow; ++k) {
                    const std::size_t i = std::size_t(k);
                    next[i] = r.E[i] * Wm[i] - (r.wL[i] * F[m][i] + r.wR[i] * F[m + 1][i]);
                }
                std::vector<double> diff(ny);
                for (std::size_t i = 0; i < ny; ++i) diff[i] = next[i] - W[m][i];
                dist = std::max(dist, modal_h2_norm(diff, mu));
                for (std::size_t i = 0; i < ny; ++i)
                    W[m][i] += omega * (next[i] - W[m][i]);
                Wm = W[m];
            }
        }

        sol.iterations = iter + 1;
        if (prev_dist > 0.0 && dist > 0.0) {
            const double ratio = dist / prev_dist;
            if (iter > 1) sol.contraction = std::max(sol.contraction, ratio);
            if (getenv("FPE_LP_TRACE"))
                fprintf(stderr, "iter %d dist %.6e ratio %.4f omega %.2f\n", iter, dist,
                        ratio, omega);
            if (ratio > 1.0) {
                ++expanding;
                ++expansions_recent;
            } else {
                expanding = 0;
            }
            if (expansions_recent >= 2) {
                if (omega > 0.26) {
                    omega *= 0.5;
                    expansions_recent = 0;
                    expanding = 0;
                }
            }
            if (expanding >= 4)
                throw NoContractionError(
                    "lyapunov_perron: updates kept expanding after damping; "
                    "spectral gap violated in practice");
        }
        prev_dist = dist;
        if (dist < opts.tol * omega) break;
        if (iter + 1 == opts.max_iter)
            throw NoContractionError("lyapunov_perron: iteration cap reached before tolerance");
    }

    sol.a0_fast = vF[M];
    sol.aj.resize(std::size_t(J));
    for (int j = 1; j <= J; ++j) sol.aj[std::size_t(j - 1)] = u[std::size_t(j - 1)][M];

    sol.T_lp_used = T_lp;
    return sol;
}

} // namespace

LpSolution lyapunov_perron(const TruncatedSystem& sys, const SineSplit& split,
                           std::span<const double> vS_modal, const LpOptions& opts) {
    // piecewise-linear panels carry an O(delta^2) bias; solving again on the
    // bisected mesh and extrapolating removes the leading term
    const LpSolution coarse = lyapunov_perron_impl(sys, split, vS_modal, opts, 0);
    LpSolution sol = lyapunov_perron_impl(sys, split, vS_modal, opts, 1);
    for (std::size_t i = 0; i < sol.a0_fast.size(); ++i)
        sol.a0_fast[i] += (sol.a0_fast[i] - coarse.a0_fast[i]) / 3.0;
    for (std::size_t j = 0; j < sol.aj.size(); ++j)
        for (std::size_t i = 0; i < sol.aj[j].size(); ++i)
            sol.aj[j][i] += (sol.aj[j][i] - coarse.aj[j][i]) / 3.0;
    sol.iterations += coarse.iterations;

    if (opts.check_horizon) {
        LpOptions o2 = opts;
        o2.check_horizon = false;
        o2.T_lp = 2.0 * sol.T_lp_used;
        o2.mesh_nodes = 2 * opts.mesh_nodes; // keep the near-history spacing
        const LpSolution s2 = lyapunov_perron(sys, split, vS_modal, o2);
        double d = 0.0;
        for (std::size_t i = 0; i < sol.a0_fast.size(); ++i)
            d = std::max(d, std::abs(s2.a0_fast[i] - sol.a0_fast[i]));
        for (std::size_t j = 0; j < sol.aj.size(); ++j)
            for (std::size_t i = 0; i < sol.aj[j].size(); ++i)
                d = std::max(d, std::abs(s2.aj[j][i] - sol.aj[j][i]));
        if (d > 10.0 * opts.tol)
            throw HorizonTooShortError("lyapunov_perron: doubling the history horizon moved "
                                       "the graph by " + std::to_string(d));
    }
    return sol;
}

LpSolution SlowManifoldGraph::apply(std::span<const double> c) const {
    if (int(c.size()) != n_slow) throw Error("SlowManifoldGraph::apply: size mismatch");
    LpSolution out;
    out.a0_fast.assign(std::size_t(ny), 0.0);
    out.aj.assign(std::size_t(J), std::vector<double>(std::size_t(ny), 0.0));
    for (int k = 0; k < n_slow; ++k) {
        const double ck = c[std::size_t(k)];
        if (ck == 0.0) continue;
        const LpSolution& col = columns[std::size_t(k)];
        for (std::size_t i = 0; i < std::size_t(ny); ++i)
            out.a0_fast[i] += ck * col.a0_fast[i];
        for (int j = 0; j < J; ++j)
            for (std::size_t i = 0; i < std::size_t(ny); ++i)
                out.aj[std::size_t(j)][i] += ck * col.aj[std::size_t(j)][i];
    }
    return out;
}

SlowManifoldGraph build_graph(const TruncatedSystem& sys, const SineSplit& split,
                              const LpOptions& opts) {
    SlowManifoldGraph g;
    g.J = sys.J;
    g.k0 = split.k0;
    g.n_slow = split.n_slow;
    g.ny = sys.ny;
    g.columns.resize(std::size_t(split.n_slow));
    for (int k = 0; k < split.n_slow; ++k) {
        std::vector<double> e(std::size_t(split.n_slow), 0.0);
        e[std::size_t(k)] = 1.0;
        g.columns[std::size_t(k)] = lyapunov_perron(sys, split, e, opts);
        g.contraction = std::max(g.contraction, g.columns[std::size_t(k)].contraction);
    }
    return g;
}

std::vector<double> reduced_step(const TruncatedSystem& sys, const SineSplit& split,
                                 const SlowManifoldGraph& graph,
                                 std::span<const double> a0S, double dt) {
    const std::size_t ny = std::size_t(sys.ny);
    SineTransform dst(ny);
    const LpSolution h = graph.apply(a0S);

    ModalState modal(std::size_t(sys.J) + 1, std::vector<double>(ny, 0.0));
    for (int k = 0; k < split.n_slow; ++k) modal[0][std::size_t(k)] = a0S[std::size_t(k)];
    for (std::size_t i = 0; i < ny; ++i) modal[0][i] += h.a0_fast[i];
    for (int j = 1; j <= sys.J; ++j) modal[std::size_t(j)] = h.aj[std::size_t(j - 1)];

    const auto phys = from_modal(dst, modal);
    const std::vector<double> row0 = sys.coupling_row(0, phys);
    const std::vector<double> rhs = dst.forward(row0);

    std::vector<double> out(std::size_t(split.n_slow));
    for (int k = 0; k < split.n_slow; ++k) {
        const double mu = dst.laplacian_eigenvalue(std::size_t(k) + 1, sys.dy);
        out[std::size_t(k)] = (a0S[std::size_t(k)] + dt * rhs[std::size_t(k)]) /
                              (1.0 + dt * sys.diff * mu);
        if (!std::isfinite(out[std::size_t(k)]) || std::abs(out[std::size_t(k)]) > kBlowupCap)
            throw StepUnstableError("reduced_step: slow modes blew up");
    }
    return out;
}

SpectralPropagator::SpectralPropagator(const TruncatedSystem& sys, double dt)
    : sys_(sys), dst_(std::size_t(sys.ny)), dt_(dt) {
    const std::size_t ny = std::size_t(sys.ny);
    const std::size_t nc = std::size_t(sys.J) + 1;
    e_full_.assign(nc, std::vector<double>(ny));
    e_half_ = e_full_;
    b1_ = e_full_;
    b23_ = e_full_;
    b4_ = e_full_;
    half_phi1_ = e_full_;
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t i = 0; i < ny; ++i) {
            const double mu = dst_.laplacian_eigenvalue(i + 1, sys.dy);
            const double z = -dt * (sys.diff * mu + sys.lambdas[j] / sys.epsilon);
            e_full_[j][i] = std::exp(z);
            e_half_[j][i] = std::exp(0.5 * z);
            half_phi1_[j][i] = 0.5 * dt * phi1(0.5 * z);
            const double p1 = phi1(z), p2 = phi2(z), p3 = phi3(z);
            b1_[j][i] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
            b23_[j][i] = dt * (2.0 * p2 - 4.0 * p3);
            b4_[j][i] = dt * (4.0 * p3 - p2);
        }
}

ModalState SpectralPropagator::nonlinear(const ModalState& u) const {
    const auto phys = from_modal(dst_, u);
    const auto rows = sys_.coupling_rates(phys);
    return to_modal(dst_, rows);
}

void SpectralPropagator::step(ModalState& u) const {
    const std::size_t nc = u.size();
    const std::size_t ny = u.empty() ? 0 : u[0].size();
    const ModalState n1 = nonlinear(u);
    ModalState a(nc, std::vector<double>(ny));
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t i = 0; i < ny; ++i)
            a[j][i] = e_half_[j][i] * u[j][i] + half_phi1_[j][i] * n1[j][i];
    const ModalState n2 = nonlinear(a);
    ModalState b(nc, std::vector<double>(ny));
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t i = 0; i < ny; ++i)
            b[j][i] = e_half_[j][i] * u[j][i] + half_phi1_[j][i] * n2[j][i];
    const ModalState n3 = nonlinear(b);
    ModalState c(nc, std::vector<double>(ny));
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t i = 0; i < ny; ++i)
            c[j][i] = e_half_[j][i] * a[j][i] + half_phi1_[j][i] * (2.0 * n3[j][i] - n1[j][i]);
    const ModalState n4 = nonlinear(c);
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t i = 0; i < ny; ++i)
            u[j][i] = e_full_[j][i] * u[j][i] + b1_[j][i] * n1[j][i] +
                      b23_[j][i] * (n2[j][i] + n3[j][i]) + b4_[j][i] * n4[j][i];
}

AttractionReport attraction_test(const TruncatedSystem& sys, const SineSplit& split,
                                 const SlowManifoldGraph& graph,
                                 std::span<const double> vS_modal, double offset_scale,
                                 double T, double dt) {
    const std::size_t ny = std::size_t(sys.ny);
    if (!(dt > 0.0)) {
        dt = 0.25 * sys.epsilon;
        const double speed = sys.max_face_speed();
        if (speed > 0.0) dt = std::min(dt, 0.25 * sys.dy / speed);
    }
    SpectralPropagator prop(sys, dt);

    // start on the graph, then push the fast components off by offset_scale
    ModalState u(std::size_t(sys.J) + 1, std::vector<double>(ny, 0.0));
    const LpSolution h0 = graph.apply(vS_modal);
    for (int k = 0; k < split.n_slow; ++k) u[0][std::size_t(k)] = vS_modal[std::size_t(k)];
    for (std::size_t i = 0; i < ny; ++i) u[0][i] += h0.a0_fast[i];
    for (int j = 1; j <= sys.J; ++j) u[std::size_t(j)] = h0.aj[std::size_t(j - 1)];
    if (offset_scale != 0.0) {
        // perturb the x-fast components; their relaxation carries the
        // lambda_1/eps attraction rate the decay fit measures
        for (int j = 1; j <= sys.J; ++j) u[std::size_t(j)][0] += offset_scale;
    }

    const double mode_l2 = std::sqrt(0.5 * double(ny + 1) * sys.dy); // Parseval factor
    auto distance = [&](const ModalState& s) {
        std::vector<double> c(std::size_t(split.n_slow));
        for (int k = 0; k < split.n_slow; ++k) c[std::size_t(k)] = s[0][std::size_t(k)];
        const LpSolution h = graph.apply(c);
        double acc = 0.0;
        for (std::size_t i = std::size_t(split.n_slow); i < ny; ++i) {
            const double d = s[0][i] - h.a0_fast[i];
            acc += d * d;
        }
        for (int j = 1; j <= sys.J; ++j)
            for (std::size_t i = 0; i < ny; ++i) {
                const double d = s[std::size_t(j)][i] - h.aj[std::size_t(j - 1)][i];
                acc += d * d;
            }
        return mode_l2 * std::sqrt(acc);
    };

    AttractionReport rep;
    rep.t.push_back(0.0);
    rep.d.push_back(distance(u));
    rep.d0 = rep.d[0];
    const long nsteps = std::lround(std::ceil(T / dt - 1e-12));
    for (long n = 0; n < nsteps; ++n) {
        prop.step(u);
        rep.t.push_back(double(n + 1) * dt);
        rep.d.push_back(distance(u));
    }

    // exponential fit over the initial relaxation window
    const double lam1 = sys.J >= 1 ? sys.lambdas[1] : 1.0;
    const double t_lo = 0.2 * sys.epsilon / lam1, t_hi = 3.0 * sys.epsilon / lam1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long npts = 0;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        if (rep.t[i] < t_lo || rep.t[i] > t_hi) continue;
        if (!(rep.d[i] > 0.0)) continue;
        const double lx = rep.t[i], ly = std::log(rep.d[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++npts;
    }
    if (npts >= 2) {
        const double denom = double(npts) * sxx - sx * sx;
        rep.fitted_rate = denom != 0.0 ? -(double(npts) * sxy - sx * sy) / denom : 0.0;
    }
    return rep;
}

} // namespace fpe
