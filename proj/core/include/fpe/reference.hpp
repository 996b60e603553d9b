#pragma once

#include "fpe/coefsys.hpp"
#include "fpe/eigenbasis.hpp"
#include "fpe/model.hpp"
#include "fpe/reconstruct.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace fpe {

/// Full 2D Fokker-Planck state on [-X, X] x (-R, R): rho[ix][iy], interior
/// y nodes, zero-flux closure at x = +-X and absorbing Dirichlet at y = +-R.
struct FullFpeState {
    double t = 0.0;
    std::vector<std::vector<double>> rho;
};

using FullObserver = std::function<void(double t, const FullFpeState&)>;

/// Dimension-split IMEX integration of
///   d_t rho = (1/eps) L1 rho + L2 rho:
/// explicit conservative y transport, then implicit x sweep with (1/eps) L1,
/// then implicit y diffusion, all first order in time. Mass may only
/// decrease (absorbing walls); an increase beyond tolerance raises
/// MassAnomalyError.
FullFpeState solve_full_fpe(const SdeModel& model, const Discretization& disc,
                            const DensityField& rho0, double T, double dt = 0.0,
                            const FullObserver& observer = {}, int observe_stride = 1);

DensityField full_state_to_density(const FullFpeState& s, const SdeModel& model,
                                   const Discretization& disc);

/// Monte Carlo ensemble with absorbing walls at |y| >= R. Reproducible:
/// identical (seed, n_paths, dt_sde) give bit-identical ensembles.
struct McEnsemble {
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    double dt_sde = 0.0;
    double t = 0.0;
    std::vector<double> x, y;        // live paths only
    std::int64_t absorbed = 0;
};

/// 2D histogram over the solver grid cells, normalized to a density
/// (counts / (n_paths * cell area)); absorbed paths contribute nothing.
struct McHistogram {
    double t = 0.0;
    std::vector<double> x_edges, y_edges;
    std::vector<std::vector<double>> density; // [ix][iy]
};

struct McResult {
    McEnsemble ensemble;
    std::vector<McHistogram> histograms;
};

McResult euler_maruyama(const SdeModel& model, const Discretization& disc,
                        std::int64_t n_paths, double T, double dt_sde, std::uint64_t seed,
                        const std::function<std::pair<double, double>(std::uint64_t)>& init,
                        std::span<const double> snapshot_times);

/// Density version of an MC histogram on the interior-node grid of the full
/// solver (cell-centered counts mapped to nodes for comparison).
DensityField histogram_to_density(const McHistogram& h);

/// Cell-averaged restriction of a node-sampled density onto histogram cells.
DensityField density_to_cells(const DensityField& d);

struct ReductionErrors {
    std::vector<double> t;
    std::vector<DensityError> density; // full minus reconstructed
    std::vector<double> marginal_l2;   // slow-marginal error
};

/// Per-snapshot L1/L2/Linf of (full - reconstructed truncated) plus the slow
/// marginal error. Snapshots must share grids and times.
ReductionErrors compare_reduction(const std::vector<DensityField>& full,
                                  const std::vector<CoefficientState>& coef,
                                  const EigenBasis& basis, const Discretization& disc,
                                  double R);

} // namespace fpe
