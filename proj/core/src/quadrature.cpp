#include "fpe/quadrature.hpp"

#include "fpe/errors.hpp"
#include "fpe/linalg.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace fpe {

GaussHermite gauss_hermite(std::size_t n) {
    if (n == 0) throw Error("gauss_hermite: n must be positive");
    // Golub-Welsch on the Jacobi matrix of the Hermite weight
    std::vector<double> diag(n, 0.0), off(n > 1 ? n - 1 : 0, 0.0);
    for (std::size_t i = 1; i < n; ++i) off[i - 1] = std::sqrt(double(i) / 2.0);
    SymtriEigen eig = symtri_eigen_full(diag, off);

    GaussHermite rule;
    rule.nodes = eig.values;
    rule.weights.resize(n);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (std::size_t j = 0; j < n; ++j) {
        const double q0 = eig.z[0 * n + j];
        rule.weights[j] = mu0 * q0 * q0;
    }
    return rule;
}

const GaussHermite& gauss_hermite_cached(std::size_t n) {
    static std::map<std::size_t, GaussHermite> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_hermite(n)).first;
    return it->second;
}

double hermite_h(std::size_t n, double z) {
    double hm1 = 0.0, h = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double hp = 2.0 * z * h - 2.0 * double(k) * hm1;
        hm1 = h;
        h = hp;
    }
    return h;
}

std::vector<double> hermite_all(std::size_t nmax, double z) {
    std::vector<double> h(nmax + 1);
    h[0] = 1.0;
    if (nmax >= 1) h[1] = 2.0 * z;
    for (std::size_t k = 1; k < nmax; ++k)
        h[k + 1] = 2.0 * z * h[k] - 2.0 * double(k) * h[k - 1];
    return h;
}

double odd_factorial(std::size_t j) {
    double p = 1.0;
    for (std::size_t m = 1; m <= j; ++m) p *= double(2 * m - 1);
    return p;
}

} // namespace fpe
