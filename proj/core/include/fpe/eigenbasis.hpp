#pragma once

#include "fpe/model.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace fpe {

enum class BasisSource { HermiteAnalytic, NumericGrid };

/// One numeric Sturm-Liouville solve at a fixed slow coordinate. phi are the
/// right eigenfunctions of the discrete L1, psi the left (dual) ones; with
/// the plain grid-sum pairing sum_i phi_j[i] psi_k[i] = delta_jk.
struct EigenSolveAtY {
    double y = 0.0;
    double dx = 0.0;
    std::vector<double> x;
    std::vector<double> lambdas;            // decay rates, ascending
    std::vector<std::vector<double>> phi;   // [mode][grid]
    std::vector<std::vector<double>> psi;   // [mode][grid]
    std::vector<double> weight;             // discrete symmetrizer d_i^2:
                                            // sum_i phi_a phi_b / weight is diagonal
};

/// Eigenbasis of the fast operator L1 phi = -lambda phi, parametric in y.
/// Carries modes 0..J plus a few spares for convergence checks. norms() holds
/// the normalization constants C_{j,j} in the unnormalized convention used by
/// the coupling tensors (C_00 = beta sqrt(pi), C_jj = beta sqrt(pi/2)(2j-1)!!
/// on the analytic path).
class EigenBasis {
public:
    int levels() const { return J_; }
    BasisSource source() const { return source_; }
    const std::vector<double>& lambdas() const { return lambdas_; }
    const std::vector<double>& norms() const { return norms_; }
    int spare_modes() const { return spares_; }

    double eval(int j, double y, double x) const;
    double eval_dy(int j, double y, double x) const;

    /// Plain L2(dx) norm of phi_j (analytic on the Hermite path).
    double l2_norm_squared(int j) const;

    /// Dual-coefficient extraction: coefficients c_0..c_jmax with
    /// u = sum_j c_j phi_j^y exactly on the span. u is sampled at the
    /// quadrature abscissae (Hermite path) or the x grid (numeric path).
    std::vector<double> dual_coefficients(double y, const std::function<double(double)>& u,
                                          int jmax, int quad_nodes) const;

    /// Numeric-path variant taking samples on the solve grid directly.
    std::vector<double> dual_coefficients_grid(double y, std::span<const double> u,
                                               int jmax) const;

    /// x-integral of u weighted by phi_j^y (a plain integral, no convention).
    double integrate_against(int j, double y, const std::function<double(double)>& u,
                             int quad_nodes) const;

    /// Integral of phi_j^y over the x line.
    double mode_mass(int j, double y, int quad_nodes) const;

    // --- Hermite-analytic path parameters ---
    double tau() const { return tau_; }
    double scale_beta() const { return beta_; }
    double center(double y) const { return a_ ? a_(y) : 0.0; }
    double dcenter(double y) const;

    // --- numeric path ---
    const EigenSolveAtY& solve_at(double y) const;

    friend EigenBasis hermite_basis(const SdeModel& model, int J);
    friend EigenBasis numeric_basis(const SdeModel& model, const Discretization& disc, int J);

private:
    int J_ = 0;
    int spares_ = 3;
    BasisSource source_ = BasisSource::HermiteAnalytic;
    std::vector<double> lambdas_;
    std::vector<double> norms_;
    SdeModel model_;
    Discretization disc_;
    // analytic path
    double tau_ = 1.0;
    double beta_ = 1.0;
    std::function<double(double)> a_; // fast nullcline a(y)
    // numeric path cache (per y solve); single-threaded use
    mutable std::map<double, std::shared_ptr<EigenSolveAtY>> cache_;

    EigenSolveAtY solve_numeric(double y) const;
};

/// Analytic Hermite-function basis for the affine Ornstein-Uhlenbeck family
/// f = (a(y) - x)/tau. lambda_n = n/tau,
/// phi_n^y(x) = exp(-xt^2/2) H_n(xt/sqrt(2)), xt = (x - a(y))/beta,
/// beta = sigma1 sqrt(tau/2). Throws UnsupportedModelError otherwise.
EigenBasis hermite_basis(const SdeModel& model, int J);

/// Finite-difference Sturm-Liouville solve on [-X, X] for general additive
/// noise drift, via symmetrization of the flux-form L1 matrix.
EigenBasis numeric_basis(const SdeModel& model, const Discretization& disc, int J);

} // namespace fpe
