// Compares the serial reference kernels against the OpenMP-parallel ones on
// representative workloads: the oracle's panel sweep and the mollified-route
// table build.

#include <benchmark/benchmark.h>

#include "dmpair/oracle.hpp"
#include "dmpair/pairing.hpp"
#include "../tests/builders.hpp"

using namespace dmpair;
using namespace dmpair::testing;

namespace {

struct Workload {
    DomainPtr dom = dom_grid_2d();
    PiecewiseField field = field_radial_2d(dom, 1.5);
    PiecewiseBV u = u_chi_square(dom);
    TestFunction phi = TestFunction::bump({0.5, 0.5}, 1.2, 2);
};

void bench_weak_divergence_serial(benchmark::State& state) {
    Workload w;
    const auto v = composite_field(w.field, w.u);
    oracle::Options opt;
    opt.panel_budget_2d = std::size_t(state.range(0));
    for (auto _ : state) {
        const auto r = oracle::weak_divergence_serial(*w.dom, v, w.phi, opt);
        benchmark::DoNotOptimize(r.value);
    }
}

void bench_weak_divergence_parallel(benchmark::State& state) {
    Workload w;
    const auto v = composite_field(w.field, w.u);
    oracle::Options opt;
    opt.panel_budget_2d = std::size_t(state.range(0));
    for (auto _ : state) {
        const auto r = oracle::weak_divergence(*w.dom, v, w.phi, opt);
        benchmark::DoNotOptimize(r.value);
    }
}

void bench_mollified_table_serial(benchmark::State& state) {
    Workload w;
    par::set_enabled(false);
    for (auto _ : state) {
        MollifiedPairing mp(w.field, w.u, {0.2, 0.1});
        benchmark::DoNotOptimize(mp.evaluate(w.phi).extrapolated);
    }
    par::set_enabled(true);
}

void bench_mollified_table_parallel(benchmark::State& state) {
    Workload w;
    for (auto _ : state) {
        MollifiedPairing mp(w.field, w.u, {0.2, 0.1});
        benchmark::DoNotOptimize(mp.evaluate(w.phi).extrapolated);
    }
}

} // namespace

BENCHMARK(bench_weak_divergence_serial)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_weak_divergence_parallel)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_mollified_table_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_mollified_table_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
