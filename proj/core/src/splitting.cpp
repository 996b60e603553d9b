#include "fpe/splitting.hpp"

#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/linalg.hpp"
#include "fpe/transforms.hpp"

#include <cmath>
#include <numbers>

namespace fpe {

int select_k0(double zeta, double lambda_min) {
    if (!(zeta > 0.0) || !(lambda_min > 0.0))
        throw Error("select_k0: zeta and lambda_min must be positive");
    const double q = lambda_min / zeta;
    if (q < 1.0)
        throw DegenerateDenominatorError("select_k0: lambda_min/zeta < 1 leaves no slow modes");
    int k0 = int(std::floor(std::sqrt(q)));
    // float guard at perfect squares
    while (double(k0 + 1) * double(k0 + 1) <= q) ++k0;
    while (double(k0) * double(k0) > q) --k0;
    return k0;
}

SineSplit make_split(double zeta, double lambda_min) {
    SineSplit s;
    s.zeta = zeta;
    s.lambda_min = lambda_min;
    s.k0 = select_k0(zeta, lambda_min);
    const double q = lambda_min / zeta;
    s.NS = q - double(s.k0 - 1) * double(s.k0 - 1);
    s.NF = q - double(s.k0) * double(s.k0) + double(s.k0) - 1.0;
    s.n_slow = s.k0 - 1;
    return s;
}

std::pair<std::vector<double>, std::vector<double>> split_slow(std::span<const double> a0,
                                                               const SineSplit& split,
                                                               double R) {
    (void)R; // the grid pins the geometry; R is kept for interface symmetry
    const SineTransform dst(a0.size());
    std::vector<double> coeff = dst.forward(a0);
    std::vector<double> slow_coeff(coeff.size(), 0.0);
    std::vector<double> fast_coeff = coeff;
    const std::size_t cut = std::size_t(std::max(0, split.k0 - 1));
    for (std::size_t k = 0; k < std::min(cut, coeff.size()); ++k) {
        slow_coeff[k] = coeff[k];
        fast_coeff[k] = 0.0;
    }
    return {dst.inverse(slow_coeff), dst.inverse(fast_coeff)};
}

namespace {

/// Apply the discrete H1 norm matrix S1 = I + D^T D (forward differences
/// with Dirichlet ghosts) to a vector.
std::vector<double> apply_h1(std::span<const double> u, double dy) {
    const std::size_t n = u.size();
    std::vector<double> v(n, 0.0);
    // D maps nodes to n+1 faces: (u_i - u_{i-1})/dy with ghosts; D^T D is the
    // standard Dirichlet second-difference stencil.
    for (std::size_t i = 0; i < n; ++i) {
        double lap = 2.0 * u[i];
        if (i > 0) lap -= u[i - 1];
        if (i + 1 < n) lap -= u[i + 1];
        v[i] = u[i] + lap / (dy * dy);
    }
    return v;
}

} // namespace

LipschitzEstimate estimate_lipschitz(const TruncatedSystem& sys, double tol) {
    const std::size_t ny = std::size_t(sys.ny);
    const double dy = sys.dy;

    // H2 norm matrix S2 = I + A^T A, A the Dirichlet second difference;
    // pentadiagonal SPD, factored once.
    std::vector<double> diag(ny, 0.0), band1(ny > 1 ? ny - 1 : 0, 0.0),
        band2(ny > 2 ? ny - 2 : 0, 0.0);
    const double c2 = 1.0 / (dy * dy * dy * dy);
    for (std::size_t i = 0; i < ny; ++i) {
        double aii = 4.0;
        if (i > 0) aii += 1.0;
        if (i + 1 < ny) aii += 1.0;
        diag[i] = 1.0 + aii * c2;
    }
    for (std::size_t i = 0; i + 1 < ny; ++i) band1[i] = -4.0 * c2;
    for (std::size_t i = 0; i + 2 < ny; ++i) band2[i] = 1.0 * c2;
    const PentaCholesky s2(diag, band1, band2);

    auto s2_inner = [&](std::span<const double> u, std::span<const double> w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ny; ++i) {
            double s = diag[i] * w[i];
            if (i > 0) s += band1[i - 1] * w[i - 1];
            if (i + 1 < ny) s += band1[i] * w[i + 1];
            if (i >= 2) s += band2[i - 2] * w[i - 2];
            if (i + 2 < ny) s += band2[i] * w[i + 2];
            acc += u[i] * s;
        }
        return acc;
    };

    // largest singular value of F_row : (H2)^{J+1} -> H1 via power iteration
    // on x <- S2^{-1} F^T S1 F x with the Rayleigh quotient
    // sigma^2 = <F x, S1 F x> / <x, S2 x>.
    auto block_norm = [&](int row) {
        std::vector<std::vector<double>> x(std::size_t(sys.J) + 1,
                                           std::vector<double>(ny, 0.0));
        double seed = 0.7071;
        for (auto& comp : x)
            for (double& v : comp) {
                seed = std::fmod(seed * 1664.525 + 0.1013, 1.0);
                v = seed - 0.5;
            }
        double sigma2_prev = -1.0, sigma2 = 0.0;
        for (int it = 0; it < 500; ++it) {
            const std::vector<double> fx = sys.coupling_row(row, x);
            const std::vector<double> s1fx = apply_h1(fx, dy);
            double num = 0.0;
            for (std::size_t i = 0; i < ny; ++i) num += fx[i] * s1fx[i];
            double den = 0.0;
            for (int k = 0; k <= sys.J; ++k)
                den += s2_inner(x[std::size_t(k)], x[std::size_t(k)]);
            if (!(den > 0.0)) return 0.0;
            sigma2 = num / den;
            if (it > 4 && std::abs(sigma2 - sigma2_prev) <= tol * std::max(sigma2, 1e-300))
                break;
            sigma2_prev = sigma2;

            std::vector<std::vector<double>> back = sys.coupling_row_adjoint(row, s1fx);
            double nrm = 0.0;
            for (int k = 0; k <= sys.J; ++k) {
                back[std::size_t(k)] = s2.solve(back[std::size_t(k)]);
                for (double v : back[std::size_t(k)]) nrm += v * v;
            }
            nrm = std::sqrt(nrm);
            if (!(nrm > 0.0)) return 0.0; // identically zero block
            for (auto& comp : back)
                for (double& v : comp) v /= nrm;
            x = std::move(back);
        }
        return std::sqrt(std::max(sigma2, 0.0));
    };

    LipschitzEstimate est;
    est.L_G = block_norm(0);
    est.L_Fj.resize(std::size_t(sys.J));
    for (int j = 1; j <= sys.J; ++j) est.L_Fj[std::size_t(j - 1)] = block_norm(j);
    return est;
}

GapReport spectral_gap(double eps, double zeta, const SineSplit& split,
                       std::span<const double> lambdas, std::span<const double> L_Fj,
                       double L_G) {
    if (eps / zeta > 1.0 + 1e-12)
        throw Error("spectral_gap: requires eps/zeta <= 1");
    GapReport r;
    r.lipschitz_F.assign(L_Fj.begin(), L_Fj.end());
    r.lipschitz_G = L_G;
    const double gamma_half = std::sqrt(std::numbers::pi); // Gamma(1/2)
    const double sum_ns_nf = split.NS + split.NF;
    const double dif_ns_nf = split.NS - split.NF;
    if (!(dif_ns_nf > 0.0))
        throw DegenerateDenominatorError("spectral_gap: NS - NF must be positive");

    double fast = 0.0;
    for (std::size_t j = 0; j < L_Fj.size(); ++j) {
        const double lam = lambdas[j + 1]; // lambdas[0] is the kernel mode
        const double denom = 2.0 * (eps / zeta - 1.0) * (-lam) + eps * sum_ns_nf;
        if (!(denom > 0.0))
            throw DegenerateDenominatorError("spectral_gap: nonpositive denominator in the "
                                             "fast term; inconsistent eps, zeta, lambda");
        fast += eps * std::numbers::sqrt2 * gamma_half * L_Fj[j] / std::sqrt(denom);
    }
    r.term_fast = fast;
    r.term_slow_sqrt = std::numbers::sqrt2 * L_G * gamma_half / std::sqrt(dif_ns_nf);
    r.term_slow_lin = 2.0 * L_G * gamma_half / dif_ns_nf;
    r.L_spec = r.term_fast + r.term_slow_sqrt + r.term_slow_lin;
    r.ok = r.L_spec < 1.0;

    double sum_f = 0.0;
    for (double v : L_Fj) sum_f += v;
    r.L_spec_simplified = std::sqrt(2.0 * std::numbers::pi) * std::sqrt(eps) * (sum_f + L_G) +
                          2.0 * std::sqrt(std::numbers::pi) * eps * L_G;
    r.ok_simplified = r.L_spec_simplified < 1.0;
    return r;
}

} // namespace fpe
