#pragma once

#include "fpe/coefsys.hpp"

#include <span>
#include <utility>
#include <vector>

namespace fpe {

/// Fast/slow sine-mode splitting of the slow variable. Modes are the
/// Dirichlet eigenfunctions sin(k pi (y+R)/(2R)) on (-R, R); indices
/// k < k0 are slow, k >= k0 fast.
struct SineSplit {
    double zeta = 0.0;
    int k0 = 1;
    double NS = 0.0;
    double NF = 0.0;
    double lambda_min = 0.0;
    int n_slow = 0; // k0 - 1 retained slow modes
};

/// Unique k0 with k0^2 <= lambda_min/zeta < (k0+1)^2.
int select_k0(double zeta, double lambda_min);

/// k0 plus the decay-rate bookkeeping constants
/// NS = lambda_min/zeta - (k0-1)^2, NF = lambda_min/zeta - k0^2 + k0 - 1,
/// so NS - NF = k0 exactly.
SineSplit make_split(double zeta, double lambda_min);

/// Sine-series split of a Dirichlet grid function into the k < k0 partial
/// sum and the remainder; the two parts sum back to the input to rounding.
std::pair<std::vector<double>, std::vector<double>> split_slow(std::span<const double> a0,
                                                               const SineSplit& split,
                                                               double R);

struct LipschitzEstimate {
    std::vector<double> L_Fj; // rows 1..J
    double L_G = 0.0;         // row 0
};

/// Grid operator norms of the coupling blocks, discrete H2 domain to
/// discrete H1 range, by power iteration on the normal equations.
LipschitzEstimate estimate_lipschitz(const TruncatedSystem& sys, double tol = 1e-6);

struct GapReport {
    double L_spec = 0.0;              // Gamma(1/2) form with gamma = delta = 1/2
    double term_fast = 0.0;           // sum over j of the F_j contribution
    double term_slow_sqrt = 0.0;      // sqrt-denominator G term
    double term_slow_lin = 0.0;       // linear-denominator G term
    std::vector<double> lipschitz_F;
    double lipschitz_G = 0.0;
    bool ok = false;                  // L_spec < 1
    double L_spec_simplified = 0.0;   // epsilon = zeta display form
    bool ok_simplified = false;
};

/// Spectral gap condition evaluated with Gamma(1/2) = sqrt(pi):
///   L_spec = sum_j eps 2^{1/2} Gamma(1/2) L_Fj /
///              (2 (eps/zeta - 1)(-lambda_j) + eps (NS + NF))^{1/2}
///          + 2^{1/2} L_G Gamma(1/2) / (NS - NF)^{1/2}
///          + 2 L_G Gamma(1/2) / (NS - NF),
/// plus the eps = zeta simplified form
///   sqrt(2 pi) eps^{1/2} (sum_j L_Fj + L_G) + 2 sqrt(pi) eps L_G.
GapReport spectral_gap(double eps, double zeta, const SineSplit& split,
                       std::span<const double> lambdas, std::span<const double> L_Fj,
                       double L_G);

} // namespace fpe
