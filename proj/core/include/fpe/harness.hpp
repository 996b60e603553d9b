#pragma once

#include "fpe/config.hpp"
#include "fpe/coefsys.hpp"
#include "fpe/coupling.hpp"
#include "fpe/eigenbasis.hpp"
#include "fpe/splitting.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fpe {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> points; // (log10 x, log10 y)
    bool available = false;
};

/// Least squares in log10-log10. Points with y below 10x the floor are
/// flagged saturated and excluded; fewer than 4 surviving points leaves the
/// fit unavailable.
RateFit fit_loglog(std::span<const std::pair<double, double>> xy, double floor = 0.0);

struct SweepPlan {
    RunConfig base;
    std::vector<double> eps_list;       // strictly decreasing, length >= 4
    std::vector<int> J_list;
    std::vector<std::string> quantities; // fast_residual | slow_error |
                                         // manifold_distance | galerkin_error | gap_ok
    int J = 6;
    std::string out_dir = "sweep_out";
};

/// Executes the per-point pipelines, persists one CSV per quantity, returns
/// the log-log fits keyed by quantity (slow_error additionally yields
/// slow_error_a0). Per-point failures are collected, not fatal.
std::map<std::string, RateFit> run_sweep(const SweepPlan& plan);

// ---- pipeline building blocks shared by the sweep, the CLI and acceptance ----

struct Pipeline {
    SdeModel model;
    EigenBasis basis;
    CouplingTensors tensors;
    TruncatedSystem system;
};

/// Hermite-path pipeline for the configured model at the given epsilon and
/// truncation level (basis, tensors on the y grid, assembled system).
Pipeline make_pipeline(const RunConfig& cfg, double eps, int J);

/// Deterministic H2-normalized profile with sine coefficients k^{-decay}
/// and pseudo-random signs up to mode kmax (0 = all grid modes); rough
/// enough in H3 to exhibit parabolic-smoothing rates on the grid.
std::vector<double> rough_sine_profile(int ny, double R, double decay, std::uint64_t seed,
                                       int kmax = 0);

/// Band-limited variant [klo, khi] with the wall derivatives removed (two
/// low-band coefficients adjusted), so transport forcing stays compatible
/// with the Dirichlet walls and no artificial boundary layer forms.
std::vector<double> rough_banded_profile(int ny, double R, double decay, std::uint64_t seed,
                                         int klo, int khi);

std::vector<double> sine_mode_profile(int ny, int k);

/// Transient decay exponent of ||a_j(t)|| from a pure mode-j start, fitted
/// over t in [0.5, 2.5] eps/lambda_j.
double measure_decay_exponent(const TruncatedSystem& sys, int j);

struct SlowErrorPoint {
    double fast_h2_sum = 0.0; // sup_{t >= 5 eps} sum_j ||a_j||_H2
    double a0_err_h2 = 0.0;   // sup_{t >= 5 eps} ||a_0^eps - a_0^0||_H2
};

/// Two sub-experiments sharing the window [5 eps, max(30 eps, 0.01)]:
/// the fast residual from wall-compatible rough a_0 data (quasi-steady
/// H1 -> H2 smoothing carries the sqrt(eps)), and the a_0 error from a pure
/// fast-transient start a_0(0) = 0 (history convolution, same exponent).
SlowErrorPoint slow_error_point(const RunConfig& cfg, double eps, int J);

/// Splitting for a configured run, honoring include_diffusion_prefactor.
SineSplit make_split_for(const RunConfig& cfg, const TruncatedSystem& sys, double zeta);

/// Sup-norm of the Lyapunov-Perron graph over the unit first slow mode.
double manifold_distance_point(const RunConfig& cfg, double eps, int J);

/// Galerkin comparison against the reference truncation J_ref at fixed eps
/// and time horizon: L2 density error of each J against J_ref, plus the
/// dt-halving floor of the J_ref run.
struct GalerkinResult {
    std::vector<std::pair<int, double>> errors;
    double floor = 0.0;
};
GalerkinResult galerkin_errors(const RunConfig& cfg, double eps, std::span<const int> J_list,
                               int J_ref, double T);

/// Largest J passing the simplified (eps = zeta) spectral gap per eps, with
/// the Lipschitz constants measured once at Jmax.
std::vector<std::pair<double, double>> gap_boundary(const RunConfig& cfg,
                                                    std::span<const double> eps_list, int Jmax);

/// Full linear-example run with pinned defaults; writes CSVs and a summary
/// under out_dir. Returns true when every checked threshold passes.
bool reproduce_paper_example(const RunConfig& cfg, const std::string& out_dir, bool fast);

} // namespace fpe
