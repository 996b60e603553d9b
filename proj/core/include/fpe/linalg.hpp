#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpe {

/// Tridiagonal system solved in-place by the Thomas algorithm.
/// lower has n-1 entries (row i couples to i-1), diag n, upper n-1.
std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

/// y = T x for the tridiagonal matrix in the same storage convention.
std::vector<double> apply_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> x);

/// Eigenvalues of a symmetric tridiagonal matrix by bisection on Sturm
/// counts. Returns the k algebraically largest, descending.
std::vector<double> symtri_largest_eigenvalues(std::span<const double> diag,
                                               std::span<const double> off,
                                               std::size_t k);

/// Eigenvector of a symmetric tridiagonal matrix for an isolated eigenvalue,
/// by inverse iteration with a perturbed shift. Unit 2-norm.
std::vector<double> symtri_eigenvector(std::span<const double> diag,
                                       std::span<const double> off,
                                       double eigenvalue);

/// Full eigendecomposition of a symmetric tridiagonal matrix (implicit-shift
/// QL with eigenvector accumulation). Eigenvalues ascending. Columns of the
/// returned dense matrix z (row-major, n x n) are the eigenvectors.
struct SymtriEigen {
    std::vector<double> values;
    std::vector<double> z; // z[i*n + j]: component i of eigenvector j
};
SymtriEigen symtri_eigen_full(std::span<const double> diag, std::span<const double> off);

/// Pentadiagonal SPD solve via banded Cholesky (bandwidth 2). Bands are
/// given as diag (n), band1 (n-1, first off-diagonal), band2 (n-2).
class PentaCholesky {
public:
    PentaCholesky(std::span<const double> diag, std::span<const double> band1,
                  std::span<const double> band2);
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t n_ = 0;
    std::vector<double> d_, l1_, l2_; // L diag and sub-bands
};

} // namespace fpe
