#include <benchmark/benchmark.h>

#include "alphamod/symbol.hpp"
#include "alphamod/windows.hpp"

using namespace alphamod;

namespace {

void BM_SymbolPoint(benchmark::State& state, Window w) {
    double xi = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(symbol_m(w, 0.5, xi));
        xi = xi < 100.0 ? xi + 0.37 : 0.0;
    }
}
BENCHMARK_CAPTURE(BM_SymbolPoint, gaussian, gaussian_window());
BENCHMARK_CAPTURE(BM_SymbolPoint, bspline4, bspline_window(4));
BENCHMARK_CAPTURE(BM_SymbolPoint, bump1, bump_window(1.0));

void BM_AdmissibilityScan(benchmark::State& state) {
    ScanConfig scan;
    scan.nodes = static_cast<std::size_t>(state.range(0));
    const Window w = gaussian_window();
    for (auto _ : state) benchmark::DoNotOptimize(admissibility_scan(w, 0.5, scan));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdmissibilityScan)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_SymbolTableLookup(benchmark::State& state) {
    const auto tab = admissibility_scan(gaussian_window(), 0.5);
    double xi = -250.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tab(xi));
        xi = xi < 250.0 ? xi + 0.013 : -250.0;
    }
}
BENCHMARK(BM_SymbolTableLookup);

}  // namespace
