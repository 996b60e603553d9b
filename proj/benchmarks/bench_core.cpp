#include <benchmark/benchmark.h>

#include "fpe/coefsys.hpp"
#include "fpe/grid.hpp"
#include "fpe/harness.hpp"
#include "fpe/quadrature.hpp"
#include "fpe/slowmanifold.hpp"
#include "fpe/splitting.hpp"
#include "fpe/transforms.hpp"

#include <cmath>

using namespace fpe;

static void BM_SineTransform(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    SineTransform dst(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.37 * double(i));
    for (auto _ : state) benchmark::DoNotOptimize(dst.forward(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SineTransform)->Arg(255)->Arg(511)->Arg(1023)->Complexity();

static void BM_GaussHermiteRule(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(std::size_t(state.range(0))));
}
BENCHMARK(BM_GaussHermiteRule)->Arg(64)->Arg(128);

static void BM_CouplingTensors(benchmark::State& state) {
    RunConfig cfg;
    const SdeModel model = cfg.make_model();
    const EigenBasis basis = hermite_basis(model, int(state.range(0)));
    Discretization disc = cfg.disc;
    const auto ygrid = interior_grid(cfg.R, 63);
    disc.ny = 63;
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_coupling(basis, model, ygrid, disc));
}
BENCHMARK(BM_CouplingTensors)->Arg(4)->Arg(8);

static void BM_CoefficientStep(benchmark::State& state) {
    RunConfig cfg;
    cfg.disc.ny = int(state.range(0));
    Pipeline p = make_pipeline(cfg, 1e-3, 6);
    CoefficientState s = zero_state(6, cfg.disc.ny);
    s.a[0] = sine_mode_profile(cfg.disc.ny, 1);
    const double dt = default_dt(p.system);
    for (auto _ : state) {
        s = step(p.system, s, dt);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_CoefficientStep)->Arg(255)->Arg(1023);

static void BM_SpectralPropagatorStep(benchmark::State& state) {
    RunConfig cfg;
    cfg.disc.ny = 255;
    Pipeline p = make_pipeline(cfg, 1e-3, 2);
    SpectralPropagator prop(p.system, 1e-4);
    ModalState u(3, std::vector<double>(255, 0.0));
    u[0][0] = 1.0;
    for (auto _ : state) {
        prop.step(u);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_SpectralPropagatorStep);

static void BM_LyapunovPerronColumn(benchmark::State& state) {
    RunConfig cfg;
    cfg.disc.ny = 255;
    Pipeline p = make_pipeline(cfg, 1e-3, 2);
    const SineSplit split = make_split(1e-3, p.system.lambdas[1]);
    std::vector<double> v(std::size_t(split.n_slow), 0.0);
    v[0] = 1.0;
    LpOptions opts;
    for (auto _ : state)
        benchmark::DoNotOptimize(lyapunov_perron(p.system, split, v, opts));
}
BENCHMARK(BM_LyapunovPerronColumn)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
