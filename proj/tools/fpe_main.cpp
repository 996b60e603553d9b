// fpe: reduction toolkit for fast-slow Fokker-Planck equations.
//
// Subcommands cover the pipeline end to end: stationary density, eigenbasis,
// coupling tensors, coefficient solves, the full 2D reference solver, Monte
// Carlo, the slow-manifold graph, reduced dynamics, the spectral-gap gate,
// error comparison, parameter sweeps and the pinned linear-example run.

#include <CLI11.hpp>

#include "fpe/config.hpp"
#include "fpe/csv.hpp"
#include "fpe/errors.hpp"
#include "fpe/grid.hpp"
#include "fpe/harness.hpp"
#include "fpe/reconstruct.hpp"
#include "fpe/reference.hpp"
#include "fpe/rng.hpp"
#include "fpe/slowmanifold.hpp"
#include "fpe/stationary.hpp"

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <sstream>
#include <tuple>
#include <fstream>
#include <iostream>
#include <numbers>

namespace {

using namespace fpe;

RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return load_config(path);
}

DensityField gaussian_density(const SdeModel& model, const Discretization& disc,
                              double x0, double y_width) {
    DensityField d;
    d.x = linspace(-disc.X, disc.X, std::size_t(disc.nx));
    d.y = interior_grid(model.R, std::size_t(disc.ny));
    d.values.assign(d.x.size(), std::vector<double>(d.y.size(), 0.0));
    const double cx = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double cy = 1.0 / (y_width * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t ix = 0; ix < d.x.size(); ++ix)
        for (std::size_t iy = 0; iy < d.y.size(); ++iy)
            d.values[ix][iy] = cx * std::exp(-0.5 * (d.x[ix] - x0) * (d.x[ix] - x0)) * cy *
                               std::exp(-0.5 * d.y[iy] * d.y[iy] / (y_width * y_width));
    return d;
}

int cmd_stationary(const RunConfig& cfg, double y, const std::string& out) {
    const SdeModel model = cfg.make_model();
    const StationaryDensity ps = stationary_density(model, y, cfg.disc);
    CsvWriter csv(out, {"x", "ps"});
    for (std::size_t i = 0; i < ps.x.size(); ++i) csv.row({ps.x[i], ps.values[i]});
    return 0;
}

int cmd_eigenbasis(const RunConfig& cfg, int J, const std::string& out, bool dump_grid) {
    const SdeModel model = cfg.make_model();
    const EigenBasis basis = (model.kind == DriftKind::OrnsteinUhlenbeck)
                                 ? hermite_basis(model, J)
                                 : numeric_basis(model, cfg.disc, J);
    CsvWriter csv(out, {"j", "lambda", "Cjj"});
    for (int j = 0; j <= J; ++j)
        csv.row({double(j), basis.lambdas()[std::size_t(j)], basis.norms()[std::size_t(j)]});
    if (dump_grid) {
        const auto xs = linspace(-cfg.disc.X, cfg.disc.X, std::size_t(cfg.disc.nx));
        CsvWriter grid(out + ".grid.csv", {"j", "x", "phi"});
        for (int j = 0; j <= J; ++j)
            for (double x : xs)
                grid.row({double(j), x, basis.eval(j, 0.0, x)});
    }
    return 0;
}

int cmd_coupling(const RunConfig& cfg, int J, const std::string& out) {
    Pipeline p = make_pipeline(cfg, cfg.epsilon, J);
    CsvWriter csv(out, {"tensor", "k", "j", "y", "value"});
    const auto& t = p.tensors;
    for (std::size_t iy = 0; iy < t.ygrid.size(); ++iy) {
        for (int j = 0; j <= J; ++j)
            csv.row_mixed({"G", "-", std::to_string(j), format_double(t.ygrid[iy]),
                           format_double(t.G[std::size_t(j)][iy])});
        for (int k = 0; k <= J; ++k)
            for (int j = 1; j <= J; ++j) {
                csv.row_mixed({"Gkj", std::to_string(k), std::to_string(j),
                               format_double(t.ygrid[iy]),
                               format_double(t.Gkj[std::size_t(k)][std::size_t(j - 1)][iy])});
                csv.row_mixed({"Gtil", std::to_string(k), std::to_string(j),
                               format_double(t.ygrid[iy]),
                               format_double(t.Gtil[std::size_t(k)][std::size_t(j - 1)][iy])});
            }
    }
    return 0;
}

int cmd_solve_coef(const RunConfig& cfg, int J, double T, int snapshots,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    Pipeline p = make_pipeline(cfg, cfg.epsilon, J);
    // the same band-limited product-Gaussian start as solve-full, so the
    // two trajectories compose directly under `fpe compare`
    auto rho_fn = [](double x, double y) { return std::exp(-0.5 * x * x - y * y); };
    CoefficientState state = decompose_density(rho_fn, p.basis, cfg.disc, cfg.R, J);

    const double dt = cfg.disc.dt > 0.0 ? cfg.disc.dt : default_dt(p.system);
    const long nsteps = std::lround(std::ceil(T / dt));
    const int stride = std::max(1, int(nsteps / std::max(1, snapshots)));
    int snap = 0;
    auto observer = [&](const CoefficientState& s) {
        CsvWriter csv(out_dir + "/snapshot_" + std::to_string(snap++) + ".csv",
                      [&] {
                          std::vector<std::string> h{"y"};
                          for (int j = 0; j <= J; ++j) h.push_back("a" + std::to_string(j));
                          return h;
                      }());
        for (std::size_t iy = 0; iy < p.system.ygrid.size(); ++iy) {
            std::vector<double> row{p.system.ygrid[iy]};
            for (int j = 0; j <= J; ++j) row.push_back(s.a[std::size_t(j)][iy]);
            csv.row(row);
        }
    };
    const NormSeries series = integrate(p.system, state, T, dt, stride, observer);

    std::vector<std::string> header{"t"};
    for (int j = 0; j <= J; ++j) header.push_back("L2_a" + std::to_string(j));
    for (int j = 0; j <= J; ++j) header.push_back("H2_a" + std::to_string(j));
    CsvWriter csv(out_dir + "/norms.csv", header);
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        std::vector<double> row{series.t[i]};
        for (int j = 0; j <= J; ++j) row.push_back(series.l2[i][std::size_t(j)]);
        for (int j = 0; j <= J; ++j) row.push_back(series.h2[i][std::size_t(j)]);
        csv.row(row);
    }
    return 0;
}

int cmd_solve_full(const RunConfig& cfg, double T, int snapshots,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const SdeModel model = cfg.make_model();
    // band-limited product-Gaussian start shared with solve-coef comparisons
    Pipeline p = make_pipeline(cfg, cfg.epsilon, 8);
    auto rho_fn = [](double x, double y) {
        return std::exp(-0.5 * x * x - y * y);
    };
    const CoefficientState c0 = decompose_density(rho_fn, p.basis, cfg.disc, cfg.R, 8);
    const DensityField rho0 = reconstruct_density(c0, p.basis, cfg.disc, cfg.R);

    const double dt = cfg.disc.dt; // <= 0 selects the solver's CFL rule
    double gmax = 0.0;
    const auto ys = interior_grid(cfg.R, std::size_t(cfg.disc.ny));
    const auto xs = linspace(-cfg.disc.X, cfg.disc.X, std::size_t(cfg.disc.nx));
    for (double x : xs)
        for (double y : ys) gmax = std::max(gmax, std::abs(model.g(x, y)));
    const double dt_eff =
        dt > 0.0 ? dt
                 : std::min(0.25 * (2.0 * cfg.R / double(cfg.disc.ny + 1)) /
                                std::max(gmax, 1e-12),
                            0.5 * model.epsilon);
    const long nsteps = std::lround(std::ceil(T / dt_eff));
    const int stride = std::max<long>(1, nsteps / std::max(1, snapshots));

    CsvWriter times(out_dir + "/times.csv", {"snapshot", "t"});
    int snap = 0;
    auto observer = [&](double t, const FullFpeState& s) {
        const DensityField d = full_state_to_density(s, model, cfg.disc);
        CsvWriter csv(out_dir + "/density_" + std::to_string(snap) + ".csv",
                      {"x", "y", "rho"});
        for (std::size_t ix = 0; ix < d.x.size(); ++ix)
            for (std::size_t iy = 0; iy < d.y.size(); ++iy)
                csv.row({d.x[ix], d.y[iy], d.values[ix][iy]});
        times.row({double(snap), t});
        ++snap;
    };
    solve_full_fpe(model, cfg.disc, rho0, T, dt_eff, observer, stride);
    return 0;
}

int cmd_mc(const RunConfig& cfg, std::int64_t paths, std::uint64_t seed, double T,
           const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const SdeModel model = cfg.make_model();
    auto init = [&](std::uint64_t path) {
        const double x = rng::standard_normal(seed, path, 1u << 20, 0);
        const double y = rng::standard_normal(seed, path, 1u << 20, 1) / std::numbers::sqrt2;
        return std::pair<double, double>(x, y);
    };
    const double snaps[] = {T};
    const McResult mc =
        euler_maruyama(model, cfg.disc, paths, T, model.epsilon / 10.0, seed, init, snaps);
    const DensityField d = histogram_to_density(mc.histograms[0]);
    CsvWriter csv(out_dir + "/histogram.csv", {"x", "y", "density"});
    for (std::size_t ix = 0; ix < d.x.size(); ++ix)
        for (std::size_t iy = 0; iy < d.y.size(); ++iy)
            csv.row({d.x[ix], d.y[iy], d.values[ix][iy]});
    CsvWriter meta(out_dir + "/meta.csv", {"n_paths", "absorbed", "t"});
    meta.row({double(mc.ensemble.n_paths), double(mc.ensemble.absorbed), mc.ensemble.t});
    return 0;
}

int cmd_check_gap(const RunConfig& cfg, int J, double eps, double zeta) {
    RunConfig c = cfg;
    if (eps > 0.0) c.epsilon = eps;
    if (zeta <= 0.0) zeta = c.zeta > 0.0 ? c.zeta : c.epsilon;
    Pipeline p = make_pipeline(c, c.epsilon, J);
    const SineSplit split = make_split_for(c, p.system, zeta);
    const LipschitzEstimate lip = estimate_lipschitz(p.system);
    const GapReport gap = spectral_gap(c.epsilon, zeta, split, p.system.lambdas, lip.L_Fj,
                                       lip.L_G);
    std::cout << "k0 = " << split.k0 << "\n"
              << "NS = " << format_double(split.NS) << "\n"
              << "NF = " << format_double(split.NF) << "\n"
              << "L_spec = " << format_double(gap.L_spec) << "\n"
              << "term_fast = " << format_double(gap.term_fast) << "\n"
              << "term_slow_sqrt = " << format_double(gap.term_slow_sqrt) << "\n"
              << "term_slow_lin = " << format_double(gap.term_slow_lin) << "\n"
              << "L_spec_simplified = " << format_double(gap.L_spec_simplified) << "\n";
    for (std::size_t j = 0; j < gap.lipschitz_F.size(); ++j)
        std::cout << "L_F" << (j + 1) << " = " << format_double(gap.lipschitz_F[j]) << "\n";
    std::cout << "L_G = " << format_double(gap.lipschitz_G) << "\n"
              << "ok = " << (gap.ok ? "true" : "false") << "\n";
    return gap.ok ? 0 : 1;
}

int cmd_manifold(const RunConfig& cfg, int J, double eps, const std::string& out) {
    RunConfig c = cfg;
    if (eps > 0.0) c.epsilon = eps;
    Pipeline p = make_pipeline(c, c.epsilon, J);
    const double zeta = c.zeta > 0.0 ? c.zeta : c.epsilon;
    const SineSplit split = make_split_for(c, p.system, zeta);
    LpOptions opts;
    opts.tol = c.lp_tol;
    opts.mesh_nodes = c.lp_mesh_nodes;
    opts.T_lp = c.lp_T;
    opts.max_iter = c.lp_max_iter;
    const SlowManifoldGraph graph = build_graph(p.system, split, opts);
    CsvWriter csv(out, {"component", "index", "slow_mode", "value"});
    for (int k = 0; k < graph.n_slow; ++k) {
        const LpSolution& col = graph.columns[std::size_t(k)];
        for (std::size_t i = 0; i < col.a0_fast.size(); ++i)
            csv.row_mixed({"a0F", std::to_string(i + 1), std::to_string(k + 1),
                           format_double(col.a0_fast[i])});
        for (int j = 1; j <= J; ++j)
            for (std::size_t i = 0; i < col.aj[std::size_t(j - 1)].size(); ++i)
                csv.row_mixed({"a" + std::to_string(j), std::to_string(i + 1),
                               std::to_string(k + 1),
                               format_double(col.aj[std::size_t(j - 1)][i])});
    }
    return 0;
}

int cmd_reduced(const RunConfig& cfg, const std::string& graph_csv, double T,
                const std::string& out) {
    // the graph file records (component, index, slow_mode, value); rebuild it
    RunConfig c = cfg;
    std::ifstream in(graph_csv);
    if (!in) throw ConfigError("reduced: cannot open " + graph_csv);
    std::string line;
    std::getline(in, line); // header
    SlowManifoldGraph graph;
    graph.ny = c.disc.ny;
    int max_slow = 0, max_j = 0;
    std::vector<std::tuple<std::string, int, int, double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string comp, idx, mode, value;
        std::getline(ss, comp, ',');
        std::getline(ss, idx, ',');
        std::getline(ss, mode, ',');
        std::getline(ss, value, ',');
        rows.emplace_back(comp, std::stoi(idx), std::stoi(mode), std::stod(value));
        max_slow = std::max(max_slow, std::stoi(mode));
        if (comp != "a0F") max_j = std::max(max_j, std::stoi(comp.substr(1)));
    }
    graph.n_slow = max_slow;
    graph.k0 = max_slow + 1;
    graph.J = max_j;
    graph.columns.assign(std::size_t(max_slow), LpSolution{});
    for (auto& col : graph.columns) {
        col.a0_fast.assign(std::size_t(graph.ny), 0.0);
        col.aj.assign(std::size_t(max_j), std::vector<double>(std::size_t(graph.ny), 0.0));
    }
    for (const auto& [comp, idx, mode, value] : rows) {
        LpSolution& col = graph.columns[std::size_t(mode - 1)];
        if (comp == "a0F") col.a0_fast[std::size_t(idx - 1)] = value;
        else col.aj[std::size_t(std::stoi(comp.substr(1)) - 1)][std::size_t(idx - 1)] = value;
    }

    Pipeline p = make_pipeline(c, c.epsilon, max_j);
    const double zeta = c.zeta > 0.0 ? c.zeta : c.epsilon;
    const SineSplit split = make_split_for(c, p.system, zeta);
    std::vector<double> a0S(std::size_t(split.n_slow), 0.0);
    a0S[0] = 1.0;
    const double dt = c.disc.dt > 0.0 ? c.disc.dt : default_dt(p.system);
    const long nsteps = std::lround(std::ceil(T / dt));
    CsvWriter csv(out, {"t", "mode", "value"});
    for (long n = 0; n <= nsteps; ++n) {
        for (int k = 0; k < split.n_slow; ++k)
            csv.row({double(n) * dt, double(k + 1), a0S[std::size_t(k)]});
        if (n < nsteps) a0S = reduced_step(p.system, split, graph, a0S, dt);
    }
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& traj_dir,
                    const std::string& basis_csv, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    // snapshots are the solve-coef outputs: columns y, a0..aJ
    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(traj_dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0) snaps.push_back(e.path());
    }
    std::sort(snaps.begin(), snaps.end());
    if (snaps.empty()) throw ConfigError("reconstruct: no snapshot_*.csv under " + traj_dir);

    auto read_snapshot = [](const fs::path& path, int& J_out) {
        std::ifstream in(path);
        if (!in) throw ConfigError("reconstruct: cannot open " + path.string());
        std::string line;
        std::getline(in, line);
        J_out = int(std::count(line.begin(), line.end(), ',')) - 1;
        std::vector<std::vector<double>> a;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::vector<double> row;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            a.push_back(std::move(row));
        }
        return a;
    };

    int J = 0;
    const auto first = read_snapshot(snaps.front(), J);
    const SdeModel model = cfg.make_model();
    const EigenBasis basis = (model.kind == DriftKind::OrnsteinUhlenbeck)
                                 ? hermite_basis(model, J)
                                 : numeric_basis(model, cfg.disc, J);
    if (!basis_csv.empty()) {
        // cross-check the recorded eigenvalues against the configured basis
        std::ifstream in(basis_csv);
        if (!in) throw ConfigError("reconstruct: cannot open " + basis_csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string js, ls;
            std::getline(ss, js, ',');
            std::getline(ss, ls, ',');
            const int j = std::stoi(js);
            if (j <= J &&
                std::abs(std::stod(ls) - basis.lambdas()[std::size_t(j)]) > 1e-6)
                throw ConfigError("reconstruct: basis file disagrees with the config");
        }
    }

    for (std::size_t s = 0; s < snaps.size(); ++s) {
        int Js = 0;
        const auto rows = read_snapshot(snaps[s], Js);
        if (Js != J) throw ConfigError("reconstruct: snapshots disagree on J");
        CoefficientState state = zero_state(J, int(rows.size()));
        for (std::size_t iy = 0; iy < rows.size(); ++iy)
            for (int j = 0; j <= J; ++j)
                state.a[std::size_t(j)][iy] = rows[iy][std::size_t(j + 1)];
        Discretization disc = cfg.disc;
        disc.ny = int(rows.size());
        const DensityField d = reconstruct_density(state, basis, disc, cfg.R);
        CsvWriter csv(out_dir + "/density_" + std::to_string(s) + ".csv", {"x", "y", "rho"});
        for (std::size_t ix = 0; ix < d.x.size(); ++ix)
            for (std::size_t iy = 0; iy < d.y.size(); ++iy)
                csv.row({d.x[ix], d.y[iy], d.values[ix][iy]});
    }
    return 0;
}

// reads density_k.csv files as written by solve-full
std::vector<DensityField> read_full_dir(const std::string& dir, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("density_", 0) == 0) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        auto key = [](const fs::path& p) {
            return std::stoi(p.stem().string().substr(8));
        };
        return key(a) < key(b);
    });
    std::vector<double> times;
    {
        std::ifstream in(dir + "/times.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line))
            times.push_back(std::stod(line.substr(line.find(',') + 1)));
    }
    std::vector<DensityField> out;
    for (std::size_t s = 0; s < files.size(); ++s) {
        DensityField d;
        d.t = s < times.size() ? times[s] : 0.0;
        d.x = linspace(-cfg.disc.X, cfg.disc.X, std::size_t(cfg.disc.nx));
        d.y = interior_grid(cfg.R, std::size_t(cfg.disc.ny));
        d.values.assign(d.x.size(), std::vector<double>(d.y.size(), 0.0));
        std::ifstream in(files[s]);
        std::string line;
        std::getline(in, line);
        std::size_t ix = 0, iy = 0;
        while (std::getline(in, line)) {
            const std::size_t c2 = line.rfind(',');
            d.values[ix][iy] = std::stod(line.substr(c2 + 1));
            if (++iy == d.y.size()) {
                iy = 0;
                ++ix;
            }
        }
        if (ix != d.x.size())
            throw ConfigError("compare: " + files[s].string() + " does not match the grid");
        out.push_back(std::move(d));
    }
    return out;
}

int cmd_compare_files(const RunConfig& cfg, const std::string& full_dir,
                      const std::string& traj_dir, const std::string& out) {
    const std::vector<DensityField> fulls = read_full_dir(full_dir, cfg);
    // coefficient snapshots from solve-coef
    namespace fs = std::filesystem;
    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(traj_dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0) snaps.push_back(e.path());
    }
    std::sort(snaps.begin(), snaps.end(), [](const fs::path& a, const fs::path& b) {
        return std::stoi(a.stem().string().substr(9)) <
               std::stoi(b.stem().string().substr(9));
    });
    if (snaps.size() != fulls.size())
        throw ConfigError("compare: snapshot counts differ between --full and --traj");

    int J = -1;
    std::vector<CoefficientState> coefs;
    for (const auto& path : snaps) {
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        const int Jfile = int(std::count(line.begin(), line.end(), ',')) - 1;
        if (J < 0) J = Jfile;
        if (J != Jfile) throw ConfigError("compare: snapshots disagree on J");
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::vector<double> row;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            rows.push_back(std::move(row));
        }
        CoefficientState st = zero_state(J, int(rows.size()));
        for (std::size_t iy = 0; iy < rows.size(); ++iy)
            for (int j = 0; j <= J; ++j) st.a[std::size_t(j)][iy] = rows[iy][std::size_t(j + 1)];
        coefs.push_back(std::move(st));
    }
    const SdeModel model = cfg.make_model();
    const EigenBasis basis = (model.kind == DriftKind::OrnsteinUhlenbeck)
                                 ? hermite_basis(model, J)
                                 : numeric_basis(model, cfg.disc, J);
    const ReductionErrors err = compare_reduction(fulls, coefs, basis, cfg.disc, cfg.R);
    CsvWriter csv(out, {"t", "L1", "L2", "Linf", "marginal_L2"});
    for (std::size_t i = 0; i < err.t.size(); ++i)
        csv.row({err.t[i], err.density[i].l1, err.density[i].l2, err.density[i].linf,
                 err.marginal_l2[i]});
    return 0;
}

int cmd_compare(const RunConfig& cfg, double T, const std::string& out) {
    // runs the full solver and the truncated system side by side from
    // band-limited initial data and writes the error series
    RunConfig c = cfg;
    const int J = c.J;
    Pipeline p = make_pipeline(c, c.epsilon, J);
    auto rho0_fn = [&](double x, double y) {
        return std::exp(-0.5 * x * x - y * y);
    };
    CoefficientState coef0 = decompose_density(rho0_fn, p.basis, c.disc, c.R, J);
    const DensityField rho0 = reconstruct_density(coef0, p.basis, c.disc, c.R);

    const int snaps = 5;
    std::vector<DensityField> full_snaps;
    std::vector<CoefficientState> coef_snaps;
    const double dt_full = c.disc.dt > 0.0 ? c.disc.dt : 0.0;
    for (int s = 1; s <= snaps; ++s) {
        const double t = T * double(s) / double(snaps);
        const FullFpeState fs = solve_full_fpe(p.model, c.disc, rho0, t, dt_full);
        full_snaps.push_back(full_state_to_density(fs, p.model, c.disc));
        CoefficientState cs = coef0;
        const double dt = default_dt(p.system);
        const long nsteps = std::lround(std::ceil(t / dt));
        for (long n = 0; n < nsteps; ++n) cs = step(p.system, cs, dt);
        coef_snaps.push_back(cs);
    }
    const ReductionErrors err = compare_reduction(full_snaps, coef_snaps, p.basis, c.disc, c.R);
    CsvWriter csv(out, {"t", "L1", "L2", "Linf", "marginal_L2"});
    for (std::size_t i = 0; i < err.t.size(); ++i)
        csv.row({err.t[i], err.density[i].l1, err.density[i].l2, err.density[i].linf,
                 err.marginal_l2[i]});
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
    SweepPlan plan;
    plan.base = cfg;
    plan.eps_list = cfg.eps_list;
    if (plan.eps_list.empty())
        plan.eps_list = {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)};
    plan.J_list = cfg.J_list;
    plan.quantities = cfg.quantities;
    if (plan.quantities.empty()) plan.quantities = {"slow_error"};
    plan.J = cfg.J;
    plan.out_dir = out_dir.empty() ? cfg.out_dir : out_dir;
    const auto fits = run_sweep(plan);
    for (const auto& [name, fit] : fits) {
        std::cout << name << ": ";
        if (fit.available)
            std::cout << "slope = " << format_double(fit.slope)
                      << ", r2 = " << format_double(fit.r2) << "\n";
        else
            std::cout << "FitUnavailable\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fast-slow Fokker-Planck reduction toolkit"};
    app.require_subcommand(1);

    std::string config_path, out = "out.csv", out_dir = "out";
    double y = 0.0, T = 1.0, eps = 0.0, zeta = 0.0;
    int J = 4, snapshots = 10;
    bool dump_grid = false, fast = false;
    std::int64_t paths = 200000;
    std::uint64_t seed = 42;
    std::string graph_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file");
    };

    auto* s_stat = app.add_subcommand("stationary", "stationary density at fixed y");
    add_common(s_stat);
    s_stat->add_option("--y", y);
    s_stat->add_option("--out", out);

    auto* s_eig = app.add_subcommand("eigenbasis", "Sturm-Liouville eigenbasis");
    add_common(s_eig);
    s_eig->add_option("--J", J);
    s_eig->add_option("--out", out);
    s_eig->add_flag("--dump-grid", dump_grid);

    auto* s_coup = app.add_subcommand("coupling", "coupling tensors");
    add_common(s_coup);
    s_coup->add_option("--J", J);
    s_coup->add_option("--out", out);

    auto* s_coef = app.add_subcommand("solve-coef", "integrate the truncated system");
    add_common(s_coef);
    s_coef->add_option("--J", J);
    s_coef->add_option("--T", T);
    s_coef->add_option("--snapshots", snapshots);
    s_coef->add_option("--out", out_dir);

    auto* s_full = app.add_subcommand("solve-full", "full 2D reference solver");
    add_common(s_full);
    s_full->add_option("--T", T);
    s_full->add_option("--snapshots", snapshots);
    s_full->add_option("--out", out_dir);

    auto* s_mc = app.add_subcommand("mc", "Euler-Maruyama Monte Carlo");
    add_common(s_mc);
    s_mc->add_option("--paths", paths);
    s_mc->add_option("--seed", seed);
    s_mc->add_option("--T", T);
    s_mc->add_option("--out", out_dir);

    auto* s_man = app.add_subcommand("manifold", "Lyapunov-Perron graph");
    add_common(s_man);
    s_man->add_option("--J", J);
    s_man->add_option("--eps", eps);
    s_man->add_option("--out", out);

    auto* s_red = app.add_subcommand("reduced", "reduced dynamics on the manifold");
    add_common(s_red);
    s_red->add_option("--graph", graph_csv)->required();
    s_red->add_option("--T", T);
    s_red->add_option("--out", out);

    std::string traj_dir = "traj", basis_csv;
    auto* s_rec = app.add_subcommand("reconstruct", "densities from coefficient snapshots");
    add_common(s_rec);
    s_rec->add_option("--traj", traj_dir);
    s_rec->add_option("--basis", basis_csv);
    s_rec->add_option("--out", out_dir);

    auto* s_gap = app.add_subcommand("check-gap", "spectral gap gate");
    add_common(s_gap);
    s_gap->add_option("--J", J);
    s_gap->add_option("--eps", eps);
    s_gap->add_option("--zeta", zeta);

    std::string full_dir;
    auto* s_cmp = app.add_subcommand("compare", "full solver vs reduction errors");
    add_common(s_cmp);
    s_cmp->add_option("--full", full_dir, "solve-full output directory");
    s_cmp->add_option("--traj", traj_dir, "solve-coef output directory");
    s_cmp->add_option("--basis", basis_csv, "optional basis cross-check");
    s_cmp->add_option("--T", T, "self-contained mode horizon when --full is absent");
    s_cmp->add_option("--out", out);

    auto* s_sweep = app.add_subcommand("sweep", "rate-fit parameter sweeps");
    add_common(s_sweep);
    s_sweep->add_option("--out", out_dir);

    auto* s_rep = app.add_subcommand("reproduce-paper-example",
                                     "pinned linear-example pipeline");
    add_common(s_rep);
    s_rep->add_option("--out", out_dir);
    s_rep->add_flag("--fast", fast, "coarse grids for a quick run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage errors exit 2
    }

    try {
        const fpe::RunConfig cfg = load_or_default(config_path);
        if (s_stat->parsed()) return cmd_stationary(cfg, y, out);
        if (s_eig->parsed()) return cmd_eigenbasis(cfg, J, out, dump_grid);
        if (s_coup->parsed()) return cmd_coupling(cfg, J, out);
        if (s_coef->parsed()) return cmd_solve_coef(cfg, J, T, snapshots, out_dir);
        if (s_full->parsed()) return cmd_solve_full(cfg, T, snapshots, out_dir);
        if (s_mc->parsed()) return cmd_mc(cfg, paths, seed, T, out_dir);
        if (s_man->parsed()) return cmd_manifold(cfg, J, eps, out);
        if (s_red->parsed()) return cmd_reduced(cfg, graph_csv, T, out);
        if (s_rec->parsed()) return cmd_reconstruct(cfg, traj_dir, basis_csv, out_dir);
        if (s_gap->parsed()) return cmd_check_gap(cfg, J, eps, zeta);
        if (s_cmp->parsed())
            return full_dir.empty() ? cmd_compare(cfg, T, out)
                                    : cmd_compare_files(cfg, full_dir, traj_dir, out);
        if (s_sweep->parsed()) return cmd_sweep(cfg, out_dir);
        if (s_rep->parsed())
            return fpe::reproduce_paper_example(cfg, out_dir, fast) ? 0 : 1;
    } catch (const fpe::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const fpe::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
