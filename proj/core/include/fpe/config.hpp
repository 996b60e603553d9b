#pragma once

#include "fpe/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace fpe {

/// Run configuration shared by every subcommand. Sections: [model], [disc],
/// [splitting], [manifold], [sweep], [acceptance]; key = value per line,
/// '#' comments. Unknown keys are rejected.
struct RunConfig {
    // [model]
    std::string kind = "ou";
    std::string f = "ou_linear";
    std::string g = "neg_x";
    double sigma1 = 1.4142135623730951;
    double sigma2 = 1.4142135623730951;
    double epsilon = 1e-3;
    double R = 4.0;

    // [disc]
    Discretization disc;

    // [splitting]
    double zeta = 0.0;                    // <= 0 ties zeta = epsilon
    bool include_diffusion_prefactor = false;

    // [manifold]
    double lp_tol = 1e-8;
    int lp_mesh_nodes = 96;
    double lp_T = 0.0;                    // <= 0 selects the decay rule
    int lp_max_iter = 200;

    // [sweep]
    std::vector<double> eps_list;
    std::vector<int> J_list;
    std::vector<std::string> quantities;
    int J = 6;
    std::string out_dir = "sweep_out";
    std::uint64_t seed = 42;

    // [acceptance]
    double slope_slow = 0.5, slope_slow_tol = 0.15;
    double slope_manifold = 1.0, slope_manifold_tol = 0.15;
    double slope_gap = -1.0 / 6.0, slope_gap_tol = 0.05;
    double fast_rate_tol = 0.05;

    SdeModel make_model() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

} // namespace fpe
