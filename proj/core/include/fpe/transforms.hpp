#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fpe {

/// In-place radix-2 FFT; size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Discrete sine transform (DST-I) on n interior nodes of a Dirichlet grid
/// with n+1 subintervals. forward() returns coefficients c_k such that
/// x_i = sum_k c_k sin(i k pi / (n+1)); inverse() evaluates that sum.
/// Uses an FFT when n+1 is a power of two, a cached matrix otherwise.
class SineTransform {
public:
    explicit SineTransform(std::size_t n);

    std::vector<double> forward(std::span<const double> x) const;
    std::vector<double> inverse(std::span<const double> coeff) const;

    std::size_t size() const { return n_; }

    /// Eigenvalue of the standard three-point Dirichlet Laplacian (-D+D-)
    /// for sine mode k (1-based) at spacing dy: (2 - 2 cos(k pi/(n+1)))/dy^2.
    double laplacian_eigenvalue(std::size_t k, double dy) const;

private:
    std::size_t n_ = 0;
    bool use_fft_ = false;
    std::vector<double> table_; // sin(i k pi/(n+1)) cache for the matrix path

    std::vector<double> unnormalized(std::span<const double> x) const;
};

} // namespace fpe
