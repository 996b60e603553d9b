#include "fpe/transforms.hpp"

#include "fpe/errors.hpp"

#include <cmath>
#include <numbers>

namespace fpe {

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw Error("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / double(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= double(n);
}

SineTransform::SineTransform(std::size_t n) : n_(n) {
    const std::size_t m = n + 1;
    use_fft_ = (m & (m - 1)) == 0 && m >= 2;
    if (!use_fft_) {
        table_.resize(n * n);
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 1; i <= n; ++i)
                table_[(k - 1) * n + (i - 1)] =
                    std::sin(double(i) * double(k) * std::numbers::pi / double(m));
    }
}

std::vector<double> SineTransform::unnormalized(std::span<const double> x) const {
    // S_k = sum_i x_i sin(i k pi/(n+1))
    std::vector<double> s(n_, 0.0);
    if (use_fft_) {
        const std::size_t m = n_ + 1;
        std::vector<std::complex<double>> z(2 * m, {0.0, 0.0});
        for (std::size_t j = 1; j <= n_; ++j) {
            z[j] = {x[j - 1], 0.0};
            z[2 * m - j] = {-x[j - 1], 0.0};
        }
        fft_pow2(z, false);
        for (std::size_t k = 1; k <= n_; ++k) s[k - 1] = -0.5 * z[k].imag();
    } else {
        for (std::size_t k = 0; k < n_; ++k) {
            double acc = 0.0;
            const double* row = &table_[k * n_];
            for (std::size_t i = 0; i < n_; ++i) acc += row[i] * x[i];
            s[k] = acc;
        }
    }
    return s;
}

std::vector<double> SineTransform::forward(std::span<const double> x) const {
    if (x.size() != n_) throw GridMismatchError("SineTransform::forward: size mismatch");
    std::vector<double> c = unnormalized(x);
    const double scale = 2.0 / double(n_ + 1);
    for (double& v : c) v *= scale;
    return c;
}

std::vector<double> SineTransform::inverse(std::span<const double> coeff) const {
    if (coeff.size() != n_) throw GridMismatchError("SineTransform::inverse: size mismatch");
    return unnormalized(coeff); // the kernel is its own inverse up to 2/(n+1)
}

double SineTransform::laplacian_eigenvalue(std::size_t k, double dy) const {
    const double theta = double(k) * std::numbers::pi / double(n_ + 1);
    return (2.0 - 2.0 * std::cos(theta)) / (dy * dy);
}

} // namespace fpe
