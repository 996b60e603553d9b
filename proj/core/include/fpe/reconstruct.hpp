#pragma once

#include "fpe/coefsys.hpp"
#include "fpe/eigenbasis.hpp"

#include <functional>
#include <vector>

namespace fpe {

/// Density on the tensor grid [-X, X] x (-R, R); values[ix][iy]. The y grid
/// holds the interior nodes only (Dirichlet zeros live on the boundary).
struct DensityField {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::vector<double>> values;
};

/// rho(t, x, y) = sum_{j<=J} a_j(t, y) phi_j^y(x) on the 2D grid.
DensityField reconstruct_density(const CoefficientState& state, const EigenBasis& basis,
                                 const Discretization& disc, double R);

/// Initial coefficients from a density: a_j(y) are the dual coefficients of
/// rho(., y) in the basis (equivalently the mode-matched inner products
/// divided by C_{j,j}), so decompose then reconstruct is the identity on the
/// band-limited span.
CoefficientState decompose_density(const std::function<double(double, double)>& rho0,
                                   const EigenBasis& basis, const Discretization& disc,
                                   double R, int J);

/// Grid-sampled variant; samples are interpolated onto the quadrature
/// abscissae in x.
CoefficientState decompose_density(const DensityField& rho0, const EigenBasis& basis,
                                   const Discretization& disc, int J);

struct DensityError {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// Trapezoid-weighted norms of a - b; throws GridMismatchError unless the
/// grids agree.
DensityError density_error(const DensityField& a, const DensityField& b);

/// Mass of the density (trapezoid in x, interior sum in y).
double density_mass(const DensityField& d);

/// x-marginal: integral of rho dx per y node.
std::vector<double> density_marginal(const DensityField& d);

} // namespace fpe
