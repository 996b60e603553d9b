#pragma once

#include <cstddef>
#include <vector>

namespace fpe {

/// Gauss-Hermite rule: integrates f against exp(-x^2) over the real line,
/// i.e. integral f(x) e^{-x^2} dx = sum_i w_i f(x_i). Exact for polynomials
/// of degree <= 2n-1.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermite gauss_hermite(std::size_t n);

/// Memoized rule lookup; node construction is an eigen-decomposition, so the
/// per-y coupling loops share one table.
const GaussHermite& gauss_hermite_cached(std::size_t n);

/// Physicists' Hermite polynomial H_n(z) via the three-term recurrence
/// H_{n+1}(z) = 2 z H_n(z) - 2 n H_{n-1}(z).
double hermite_h(std::size_t n, double z);

/// H_0(z)..H_nmax(z) in one sweep.
std::vector<double> hermite_all(std::size_t nmax, double z);

/// Odd factorial (2j-1)!! with the empty-product convention for j = 0.
double odd_factorial(std::size_t j);

} // namespace fpe
