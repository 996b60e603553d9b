#pragma once

#include "fpe/coefsys.hpp"
#include "fpe/splitting.hpp"
#include "fpe/transforms.hpp"

#include <memory>
#include <vector>

namespace fpe {

/// Modal image of a coefficient state: sine coefficients per component,
/// modal[0] = a_0, modal[j] = a_j.
using ModalState = std::vector<std::vector<double>>;

ModalState to_modal(const SineTransform& dst, const std::vector<std::vector<double>>& a);
std::vector<std::vector<double>> from_modal(const SineTransform& dst, const ModalState& m);

struct LpOptions {
    double T_lp = 0.0;      // history horizon; <= 0 selects the decay rule
    int mesh_nodes = 96;    // geometric time mesh size
    double tol = 1e-8;      // weighted sup-norm stopping tolerance
    int max_iter = 200;
    bool check_horizon = false; // re-solve with doubled horizon and compare
};

/// Converged Lyapunov-Perron graph values at t = 0 for one slow input.
struct LpSolution {
    std::vector<double> a0_fast;           // modal; entries below k0 are zero
    std::vector<std::vector<double>> aj;   // [j-1] modal, j = 1..J
    int iterations = 0;
    double contraction = 0.0;              // max ratio of successive updates
    double T_lp_used = 0.0;
};

/// Fixed point of the Lyapunov-Perron history map for the truncated system,
/// holding the slow sine modes at t = 0 equal to vS_modal. Requires the
/// spectral gap (throws NoContractionError when the iteration expands).
LpSolution lyapunov_perron(const TruncatedSystem& sys, const SineSplit& split,
                           std::span<const double> vS_modal, const LpOptions& opts = {});

/// Linear graph h: slow modes -> (fast part of a_0, a_1..a_J), assembled one
/// Lyapunov-Perron solve per slow basis mode.
struct SlowManifoldGraph {
    int J = 0;
    int k0 = 1;
    int n_slow = 0;
    int ny = 0;
    std::vector<LpSolution> columns; // per slow mode k = 1..k0-1
    double contraction = 0.0;

    /// Graph values for slow coordinates c (length n_slow).
    LpSolution apply(std::span<const double> c) const;
};

SlowManifoldGraph build_graph(const TruncatedSystem& sys, const SineSplit& split,
                              const LpOptions& opts = {});

/// One IMEX step of the reduced dynamics on the manifold, in slow-mode
/// coordinates: implicit diffusion, explicit slow-projected transport of
/// a_0S + h_F(a_0S) and of the graph components.
std::vector<double> reduced_step(const TruncatedSystem& sys, const SineSplit& split,
                                 const SlowManifoldGraph& graph,
                                 std::span<const double> a0S, double dt);

/// Exponential-integrator propagation (ETDRK4) of the full truncated system
/// in sine space: diffusion and relaxation are exact per mode, the coupling
/// block is the explicit stage function. Used where backward-Euler bias
/// would mask invariance-level accuracy.
class SpectralPropagator {
public:
    SpectralPropagator(const TruncatedSystem& sys, double dt);
    void step(ModalState& state) const;
    double dt() const { return dt_; }
    const SineTransform& transform() const { return dst_; }

private:
    const TruncatedSystem& sys_;
    SineTransform dst_;
    double dt_;
    // per component/mode exponential tables
    std::vector<std::vector<double>> e_full_, e_half_, b1_, b23_, b4_, half_phi1_;
    ModalState nonlinear(const ModalState& u) const;
};

struct AttractionReport {
    double d0 = 0.0;
    double fitted_rate = 0.0;
    std::vector<double> t;
    std::vector<double> d;
};

/// Integrates the truncated system from the graph point at vS plus an
/// off-manifold perturbation of the fast components, records the distance of
/// the trajectory's fast part from the graph at its instantaneous slow
/// coordinates, and fits the initial exponential decay rate.
AttractionReport attraction_test(const TruncatedSystem& sys, const SineSplit& split,
                                 const SlowManifoldGraph& graph,
                                 std::span<const double> vS_modal, double offset_scale,
                                 double T, double dt = 0.0);

} // namespace fpe
