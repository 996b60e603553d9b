#include "fpe/linalg.hpp"

#include "fpe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpe {

std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
    if (n == 0) return x;
    double beta = diag[0];
    if (beta == 0.0) throw Error("solve_tridiagonal: zero pivot at row 0");
    c[0] = (n > 1) ? upper[0] / beta : 0.0;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = diag[i] - lower[i - 1] * c[i - 1];
        if (beta == 0.0) throw Error("solve_tridiagonal: zero pivot");
        if (i < n - 1) c[i] = upper[i] / beta;
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / beta;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

std::vector<double> apply_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> x) {
    const std::size_t n = diag.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i - 1] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

namespace {

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly less
/// than sigma (Sturm sequence count with the standard safeguard).
std::size_t sturm_count(std::span<const double> diag, std::span<const double> off,
                        double sigma) {
    const std::size_t n = diag.size();
    std::size_t count = 0;
    double q = diag[0] - sigma;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        const double b2 = off[i - 1] * off[i - 1];
        double denom = q;
        if (denom == 0.0) denom = std::numeric_limits<double>::min();
        q = diag[i] - sigma - b2 / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace

std::vector<double> symtri_largest_eigenvalues(std::span<const double> diag,
                                               std::span<const double> off,
                                               std::size_t k) {
    const std::size_t n = diag.size();
    k = std::min(k, n);
    // Gershgorin bounds
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double span = std::max(hi - lo, 1.0);
    std::vector<double> out(k, 0.0);
    for (std::size_t m = 0; m < k; ++m) {
        // eigenvalue with exactly (n - 1 - m) below it
        const std::size_t want = n - 1 - m;
        double a = lo, b = hi;
        for (int it = 0; it < 120 && (b - a) > 1e-15 * span; ++it) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(diag, off, mid) > want)
                b = mid;
            else
                a = mid;
        }
        out[m] = 0.5 * (a + b);
    }
    return out;
}

std::vector<double> symtri_eigenvector(std::span<const double> diag,
                                       std::span<const double> off,
                                       double eigenvalue) {
    const std::size_t n = diag.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(off[i]));
    const double shift = eigenvalue + 1e-12 * std::max(scale, 1.0);

    std::vector<double> v(n);
    // deterministic quasi-random start
    double s = 0.12345;
    for (std::size_t i = 0; i < n; ++i) {
        s = std::fmod(s * 997.0 + 0.618, 1.0);
        v[i] = s - 0.5;
    }
    std::vector<double> d(n), l(n > 0 ? n - 1 : 0), u(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) { l[i] = off[i]; u[i] = off[i]; }

    for (int it = 0; it < 4; ++it) {
        v = solve_tridiagonal(l, d, u, v);
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw Error("symtri_eigenvector: inverse iteration failed");
        for (double& x : v) x /= nrm;
    }
    return v;
}

SymtriEigen symtri_eigen_full(std::span<const double> diag, std::span<const double> off) {
    const std::size_t n = diag.size();
    SymtriEigen r;
    r.values.assign(diag.begin(), diag.end());
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off[i];
    r.z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) r.z[i * n + i] = 1.0;

    auto& d = r.values;
    auto& z = r.z;
    auto pythag = [](double a, double b) {
        const double aa = std::abs(a), ab = std::abs(b);
        if (aa > ab) { const double t = ab / aa; return aa * std::sqrt(1.0 + t * t); }
        if (ab == 0.0) return 0.0;
        const double t = aa / ab;
        return ab * std::sqrt(1.0 + t * t);
    };

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw Error("symtri_eigen_full: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double rr = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(rr, g));
                double si = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = si * e[i];
                    const double b = c * e[i];
                    rr = pythag(f, g);
                    e[i + 1] = rr;
                    if (rr == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    si = f / rr;
                    c = g / rr;
                    g = d[i + 1] - p;
                    rr = (d[i] - g) * si + 2.0 * c * b;
                    p = si * rr;
                    d[i + 1] = g + p;
                    g = c * rr - b;
                    for (std::size_t kk = 0; kk < n; ++kk) {
                        f = z[kk * n + (i + 1)];
                        z[kk * n + (i + 1)] = si * z[kk * n + i] + c * f;
                        z[kk * n + i] = c * z[kk * n + i] - si * f;
                    }
                }
                if (rr == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    // sort ascending, permuting eigenvector columns
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> dv(n), zz(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        dv[j] = d[idx[j]];
        for (std::size_t i = 0; i < n; ++i) zz[i * n + j] = z[i * n + idx[j]];
    }
    r.values = std::move(dv);
    r.z = std::move(zz);
    return r;
}

PentaCholesky::PentaCholesky(std::span<const double> diag, std::span<const double> band1,
                             std::span<const double> band2)
    : n_(diag.size()), d_(diag.size(), 0.0), l1_(diag.size(), 0.0), l2_(diag.size(), 0.0) {
    // A = L D L^T with unit lower triangular L carrying bands l1 (offset 1)
    // and l2 (offset 2); l1_[i] multiplies x[i-1], l2_[i] multiplies x[i-2].
    for (std::size_t i = 0; i < n_; ++i) {
        if (i >= 2) l2_[i] = band2[i - 2] / d_[i - 2];
        if (i >= 1) {
            double v = band1[i - 1];
            if (i >= 2) v -= l2_[i] * d_[i - 2] * l1_[i - 1];
            l1_[i] = v / d_[i - 1];
        }
        double di = diag[i];
        if (i >= 1) di -= l1_[i] * l1_[i] * d_[i - 1];
        if (i >= 2) di -= l2_[i] * l2_[i] * d_[i - 2];
        if (di <= 0.0) throw Error("PentaCholesky: matrix not positive definite");
        d_[i] = di;
    }
}

std::vector<double> PentaCholesky::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n_; ++i) {
        if (i >= 1) x[i] -= l1_[i] * x[i - 1];
        if (i >= 2) x[i] -= l2_[i] * x[i - 2];
    }
    for (std::size_t i = 0; i < n_; ++i) x[i] /= d_[i];
    for (std::size_t i = n_; i-- > 0;) {
        if (i + 1 < n_) x[i] -= l1_[i + 1] * x[i + 1];
        if (i + 2 < n_) x[i] -= l2_[i + 2] * x[i + 2];
    }
    return x;
}

} // namespace fpe
