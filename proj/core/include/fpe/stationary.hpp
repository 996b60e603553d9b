#pragma once

#include "fpe/model.hpp"

#include <span>
#include <vector>

namespace fpe {

/// Stationary density of the fast operator at a fixed slow coordinate,
/// p_s = c e^{Psi} with Psi the x-antiderivative of 2 f / sigma1^2,
/// normalized to unit trapezoid mass on [-X, X].
struct StationaryDensity {
    double y_param = 0.0;
    std::vector<double> x;      // grid
    std::vector<double> values; // p_s >= 0
    double normalizer = 0.0;    // the constant c
    double dx = 0.0;
};

StationaryDensity stationary_density(const SdeModel& model, double y,
                                     const Discretization& disc,
                                     double tail_tol = 1e-10);

/// Discrete rank-one projector P u = p_s * (trapezoid integral of u) and its
/// complement Q = I - P, sharing the trapezoid inner product with the PDE
/// stencils so that P^2 = P holds to rounding.
struct ProjectionPair {
    std::vector<double> ps;      // range of P
    std::vector<double> weights; // trapezoid weights (already scaled by dx)

    std::vector<double> apply_p(std::span<const double> u) const;
    std::vector<double> apply_q(std::span<const double> u) const;
};

ProjectionPair build_projections(const StationaryDensity& ps, const Discretization& disc);

} // namespace fpe
