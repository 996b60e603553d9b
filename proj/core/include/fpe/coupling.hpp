#pragma once

#include "fpe/eigenbasis.hpp"
#include "fpe/model.hpp"

#include <span>
#include <vector>

namespace fpe {

/// Coupling tensors of the coefficient system, sampled on the y grid.
/// Product tensors use the mode-matched pairing of the eigenbasis: a function
/// u is expanded in its dual coefficients c_m(u) (u = sum c_m phi_m exactly)
/// and <<u, v>> = sum_m c_m(u) c_m(v) ||phi_m||^2. On the Hermite path this
/// reproduces the closed-form delta tables of the linear test model; plain
/// pointwise products are not orthogonal in L2 and would not.
struct CouplingTensors {
    int J = 0;
    double C0 = 0.0;               // integral of phi_0 over x
    std::vector<double> norms;     // C_{j,j} for j = 0..J (row normalizers)
    std::vector<double> lambdas;   // decay rates 0..J from the basis
    std::vector<double> ygrid;
    std::vector<std::vector<double>> G; // G[j][iy], j = 0..J: integral g phi_j dx

    // Gkj[k][j-1][iy] = <<g phi_k, phi_j>>       (k = 0..J, j = 1..J)
    // Gtil[k][j-1][iy] = <<g phi_k, d_y phi_j>>
    std::vector<std::vector<std::vector<double>>> Gkj;
    std::vector<std::vector<std::vector<double>>> Gtil;
};

CouplingTensors compute_coupling(const EigenBasis& basis, const SdeModel& model,
                                 std::span<const double> ygrid, const Discretization& disc);

} // namespace fpe
