#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fpe {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    if (n == 1) { x[0] = a; return x; }
    const double h = (b - a) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + double(i) * h;
    x.back() = b;
    return x;
}

/// Interior nodes of (-R, R): y_i = -R + i*dy, i = 1..ny, dy = 2R/(ny+1).
/// The Dirichlet endpoints are not part of the unknown vector.
inline std::vector<double> interior_grid(double R, std::size_t ny) {
    std::vector<double> y(ny);
    const double dy = 2.0 * R / double(ny + 1);
    for (std::size_t i = 0; i < ny; ++i) y[i] = -R + double(i + 1) * dy;
    return y;
}

inline double trapezoid(std::span<const double> f, double dx) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dx;
}

/// Cumulative trapezoid anchored so that the result is 0 at index `anchor`.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx,
                                                std::size_t anchor) {
    std::vector<double> F(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        F[i] = F[i - 1] + 0.5 * (f[i - 1] + f[i]) * dx;
    const double off = F[anchor];
    for (double& v : F) v -= off;
    return F;
}

inline double norm_l2(std::span<const double> u, double dx) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return std::sqrt(s * dx);
}

inline double norm_inf(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

/// Discrete H2 norm: ||u||^2 + ||D+D- u||^2 on the interior grid, with the
/// second difference copied one-sidedly at the first and last nodes.
inline double norm_h2(std::span<const double> u, double dy) {
    const std::size_t n = u.size();
    if (n < 3) return norm_l2(u, dy);
    std::vector<double> d2(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d2[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dy * dy);
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * u[i] + d2[i] * d2[i];
    return std::sqrt(s * dy);
}

/// Discrete H1 norm: ||u||^2 + ||D+ u||^2 with zero Dirichlet ghosts.
inline double norm_h1(std::span<const double> u, double dy) {
    const std::size_t n = u.size();
    double s = 0.0;
    double prev = 0.0; // Dirichlet ghost
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (u[i] - prev) / dy;
        s += u[i] * u[i] + d * d;
        prev = u[i];
    }
    s += (0.0 - prev) / dy * (0.0 - prev) / dy;
    return std::sqrt(s * dy);
}

/// Cubic (4-point Lagrange) interpolation of samples on a uniform grid
/// starting at x0 with spacing dx. Clamps to the valid stencil range.
inline double interp_cubic(std::span<const double> f, double x0, double dx, double x) {
    const std::ptrdiff_t n = std::ptrdiff_t(f.size());
    if (n == 0) return 0.0;
    if (n < 4) {
        // fall back to nearest sample
        std::ptrdiff_t i = std::ptrdiff_t(std::llround((x - x0) / dx));
        i = std::max<std::ptrdiff_t>(0, std::min(n - 1, i));
        return f[std::size_t(i)];
    }
    double s = (x - x0) / dx;
    std::ptrdiff_t i1 = std::ptrdiff_t(std::floor(s));
    i1 = std::max<std::ptrdiff_t>(1, std::min(n - 3, i1));
    const double t = s - double(i1);
    const double fm1 = f[std::size_t(i1 - 1)], f0 = f[std::size_t(i1)];
    const double f1 = f[std::size_t(i1 + 1)], f2 = f[std::size_t(i1 + 2)];
    // Lagrange basis on offsets {-1, 0, 1, 2}
    const double lm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return lm1 * fm1 + l0 * f0 + l1 * f1 + l2 * f2;
}

} // namespace fpe
