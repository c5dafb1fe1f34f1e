// Serial vs OpenMP for the three data-parallel kernels.

#include "beamflutter/integrator.hpp"
#include "beamflutter/modes.hpp"
#include "beamflutter/stability.hpp"

#include <benchmark/benchmark.h>

using namespace beamflutter;

namespace {

Execution policy(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial() : Execution::openmp();
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "openmp(" + std::to_string(available_threads()) + ")");
}

void BM_UcritSweep(benchmark::State& state) {
    SweepRequest r;
    r.config = BoundaryConfig::make(Config::C);
    r.base.D = 23.9;
    r.base.beta = 1.2e-4;
    r.axis = SweepAxis::L;
    for (int i = 0; i < 41; ++i) r.values.push_back(100.0 + 10.0 * i);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_ucrit(r, policy(state)));
    label(state);
}

void BM_OverlapQuadrature(benchmark::State& state) {
    const ModeBasis basis = build_mode_basis(BoundaryConfig::make(Config::CF), BeamParams{}, 10);
    for (auto _ : state) benchmark::DoNotOptimize(overlap_matrix_quadrature(basis, 8192, policy(state)));
    label(state);
}

void BM_Battery(benchmark::State& state) {
    const auto cfg = BoundaryConfig::make(Config::H);
    std::vector<SimulationCase> cases;
    for (double eps : {0.0, 0.1, 0.01, 0.001}) {
        SimulationCase c;
        c.config = cfg;
        c.params.U = 200.0;
        c.params.b2 = 1.0;
        c.grid = build_grid(1.0, 64);
        c.horizon = 0.5;
        c.options.rtol = 1e-6;
        c.options.atol = 1e-8;
        c.initial = sample_initial(SineID{eps}, c.grid, cfg);
        cases.push_back(std::move(c));
    }
    for (auto _ : state) benchmark::DoNotOptimize(run_battery(cases, policy(state)));
    label(state);
}

} // namespace

BENCHMARK(BM_UcritSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OverlapQuadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Battery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
