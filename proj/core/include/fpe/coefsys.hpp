#pragma once

#include "fpe/coupling.hpp"
#include "fpe/model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace fpe {

/// Time slice of the truncated coefficient system: a[j][iy] on the interior
/// y grid, j = 0..J. Dirichlet zeros at +-R are implicit ghosts.
struct CoefficientState {
    double t = 0.0;
    std::vector<std::vector<double>> a;
};

CoefficientState zero_state(int J, int ny);

/// Truncated coefficient PDE system on (-R, R) with every row normalized so
/// the time-derivative coefficient is 1: the a_0 row is divided by C_0 and
/// the a_j rows by C_{j,j}. Diffusion is (sigma2^2/2) d_yy on every row,
/// relaxation lambda_j/eps on rows j >= 1, and all tensor transport/reaction
/// terms live in the explicit coupling block.
struct TruncatedSystem {
    int J = 0;
    int ny = 0;
    double epsilon = 0.0;
    double R = 0.0;
    double dy = 0.0;
    double diff = 0.0;            // sigma2^2 / 2
    std::vector<double> ygrid;
    std::vector<double> lambdas;  // relaxation rates, lambdas[0] = 0

    // normalized transport T[row][src][node] (term -d_y(T a_src)) and
    // reaction Rx[row][src][node] (term +Rx a_src)
    std::vector<std::vector<std::vector<double>>> T;
    std::vector<std::vector<std::vector<double>>> Rx;
    std::vector<std::vector<bool>> active; // [row][src]: any nonzero entry

    /// Explicit coupling rates for all rows.
    std::vector<std::vector<double>> coupling_rates(
        const std::vector<std::vector<double>>& a) const;

    /// Coupling rate for a single row (used by the norm estimators).
    std::vector<double> coupling_row(int row, const std::vector<std::vector<double>>& a) const;

    /// Adjoint of coupling_row with respect to the unweighted grid sum.
    std::vector<std::vector<double>> coupling_row_adjoint(int row,
                                                          std::span<const double> v) const;

    double max_face_speed() const;
};

TruncatedSystem assemble(const CouplingTensors& coupling, const SdeModel& model,
                         const Discretization& disc, int J);

/// One IMEX step: forward Euler on the coupling block, backward Euler on
/// diffusion and relaxation (tridiagonal solve per row). Throws
/// StepUnstableError past the blow-up cap.
CoefficientState step(const TruncatedSystem& sys, const CoefficientState& state, double dt);

/// CFL rule: dt = min(0.25 dy / max|T at faces|, 0.1 eps).
double default_dt(const TruncatedSystem& sys);

struct NormSeries {
    std::vector<double> t;
    std::vector<std::vector<double>> l2; // [sample][mode]
    std::vector<std::vector<double>> h2;
};

using StateObserver = std::function<void(const CoefficientState&)>;

/// Fixed-step integration to time T recording grid L2 and discrete H2 norms
/// per mode at every observer stride.
NormSeries integrate(const TruncatedSystem& sys, CoefficientState& state, double T, double dt,
                     int observe_stride = 1, const StateObserver& observer = {});

inline constexpr double kBlowupCap = 1e12;

} // namespace fpe
