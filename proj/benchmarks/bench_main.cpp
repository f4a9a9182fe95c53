#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "fracdamp/bessel.hpp"
#include "fracdamp/evolution.hpp"
#include "fracdamp/spectral.hpp"

using namespace fracdamp;

namespace {

AugmentedSystem make_system(int n_x, double alpha_frac) {
    GridConfig grid;
    grid.n_x = n_x;
    grid.n_xi = 200;
    return build_system(validate_config(make_model_config(0.5, alpha_frac, 1.0, 1.0), grid));
}

void BM_BesselSeries(benchmark::State& state) {
    const std::complex<double> z(12.0, -3.0);
    for (auto _ : state) benchmark::DoNotOptimize(bessel_j(1.0 / 3.0, z));
}
BENCHMARK(BM_BesselSeries);

void BM_BesselAsymptotic(benchmark::State& state) {
    const std::complex<double> z(60.0, -3.0);
    for (auto _ : state) benchmark::DoNotOptimize(bessel_j(1.0 / 3.0, z));
}
BENCHMARK(BM_BesselAsymptotic);

void BM_BuildQuadrature(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_quadrature(0.5, 1.0, 200, 1e-4, 1e4));
}
BENCHMARK(BM_BuildQuadrature);

void BM_CrankNicolsonStep(benchmark::State& state) {
    const auto sys = make_system(static_cast<int>(state.range(0)), 0.5);
    CrankNicolson cn(sys, 1e-3);
    State s = sys.zero_state();
    s.psi = edge_of_domain_initial_data(sys);
    for (auto _ : state) benchmark::DoNotOptimize(cn.advance(s));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrankNicolsonStep)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oN);

void BM_RefineRoot(benchmark::State& state) {
    const auto cfg = make_model_config(0.5, 0.75, 1.0, 1.0);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(refine_root(asymptotic_root(k, 0.5), cfg, k));
}
BENCHMARK(BM_RefineRoot)->Arg(10)->Arg(40);

void BM_ResolventNorm(benchmark::State& state) {
    const auto sys = make_system(static_cast<int>(state.range(0)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(resolvent_norm(-500.0, sys.generator));
}
BENCHMARK(BM_ResolventNorm)->Arg(128)->Arg(256);

void BM_GeneratorSpectrum(benchmark::State& state) {
    const auto sys = make_system(static_cast<int>(state.range(0)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(generator_spectrum(sys.generator));
}
BENCHMARK(BM_GeneratorSpectrum)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
