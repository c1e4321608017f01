#include <benchmark/benchmark.h>

#include "wavekin/duhamel.hpp"
#include "wavekin/ensemble.hpp"
#include "wavekin/kinetic.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/nls.hpp"
#include "wavekin/resonance.hpp"

using namespace wavekin;

static void BM_integrate_plane(benchmark::State& state) {
    const ComplexGaussian f =
        make_gaussian(cd(0.7, 0.2), cd(0.9, 0.4), {cd(0.1, -0.3), cd(0.5, 0.2)});
    const ComplexGaussian g =
        make_gaussian(cd(1.1, -0.1), cd(0.6, -0.2), {cd(-0.4, 0.1), cd(0.0, 0.3)});
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_plane(product({f, g}, {false, true})));
}
BENCHMARK(BM_integrate_plane);

static void BM_coarse_grain_phi(benchmark::State& state) {
    const ScalingParams p{static_cast<double>(state.range(0)), 0.05, 0.1, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(coarse_grain_phi(p, eta, 0.25, -0.5));
}
BENCHMARK(BM_coarse_grain_phi)->Arg(8)->Arg(32);

static void BM_level_set_profile(benchmark::State& state) {
    const LatticeSpec lat{static_cast<double>(state.range(0))};
    const SpectralProfile eta = make_profile("bump", 1.0);
    const SiteTable z = make_site_table(lat, eta, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(level_set_profile(lat, z, {1, 0}, 1.0));
}
BENCHMARK(BM_level_set_profile)->Arg(8)->Arg(16);

static void BM_resonant_level_fast(benchmark::State& state) {
    const LatticeSpec lat{static_cast<double>(state.range(0))};
    const SpectralProfile eta = make_profile("bump", 1.0);
    const SiteTable z = make_site_table(lat, eta, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(resonant_level_fast(lat, z, {0, 0}, 1.0));
}
BENCHMARK(BM_resonant_level_fast)->Arg(16)->Arg(64);

static void BM_w1_kernel(benchmark::State& state) {
    const ScalingParams p{4.0, 0.1, 0.15, 0.0, 0.05};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            w1_kernel(p, 0.25, 0.0, -0.5, 0.25, 0.25, -0.25, 0.0, 0.0, 0.7));
}
BENCHMARK(BM_w1_kernel);

static void BM_v1_leading(benchmark::State& state) {
    const ScalingParams p{static_cast<double>(state.range(0)), 0.05, 0.1, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(v1_leading(p, eta, {0, 0}, 1.5));
}
BENCHMARK(BM_v1_leading)->Arg(4)->Arg(8);

static void BM_chart_integral(benchmark::State& state) {
    const SpectralProfile eta = make_profile("bump", 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            cr_operator(eta, eta, eta, 0.15, -0.1, ChartOptions{1e-6, 1e-12}));
}
BENCHMARK(BM_chart_integral);

static void BM_nls_step(benchmark::State& state) {
    NlsConfig cfg{static_cast<int>(state.range(0)), 40.0, 1e-3, 1.0};
    SplitStepSolver sol(cfg);
    ScalingParams p{2.0, 0.3, 0.4, 0.05, 0.05};
    sol.set_initial_lattice(p, make_profile("bump", 1.0));
    for (auto _ : state) sol.run_steps(1);
}
BENCHMARK(BM_nls_step)->Arg(128)->Arg(512);

static void BM_variance_mc(benchmark::State& state) {
    const ScalingParams p{2.0, 0.1, 0.15, 0.0, 0.05};
    const SpectralProfile eta = make_profile("bump", 1.0);
    EnsembleOptions opt;
    opt.n_realizations = static_cast<std::size_t>(state.range(0));
    opt.include_v2 = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(variance_mc(p, eta, {1, 0}, 0.5, opt));
}
BENCHMARK(BM_variance_mc)->Arg(100);

BENCHMARK_MAIN();
