#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "alphamod/frames.hpp"

using namespace alphamod;

namespace {

AlphaFrame chirp_frame(std::size_t n, double eps) {
    const auto g = SampledGrid::centered(n, 1.0 / 32.0);
    const double nyq = 0.5 / g.spacing();
    return AlphaFrame(build_covering(0.5, eps, 1.0, {g.front() - 2.0, g.back() + 2.0}, {-nyq, nyq}),
                      gaussian_window(), g);
}

Signal chirp(const SampledGrid& g) {
    return Signal::sample(g, [](double t) {
        const double u = t / 4.0;
        return std::exp(-std::numbers::pi * u * u) * std::exp(complex(0.0, 2.0 * std::numbers::pi * 0.3 * t * t));
    });
}

void BM_FrameApply(benchmark::State& state) {
    const auto fr = chirp_frame(static_cast<std::size_t>(state.range(0)), 0.25);
    const auto f = chirp(fr.signal_grid());
    benchmark::DoNotOptimize(frame_operator_apply(f, fr));  // warm the atom cache
    for (auto _ : state) benchmark::DoNotOptimize(frame_operator_apply(f, fr));
    state.counters["atoms"] = static_cast<double>(fr.size());
}
BENCHMARK(BM_FrameApply)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Analysis(benchmark::State& state) {
    const auto fr = chirp_frame(1024, 0.25);
    const auto f = chirp(fr.signal_grid());
    benchmark::DoNotOptimize(analysis(f, fr));
    for (auto _ : state) benchmark::DoNotOptimize(analysis(f, fr));
}
BENCHMARK(BM_Analysis)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
    const auto fr = chirp_frame(1024, 0.25);
    const auto f = chirp(fr.signal_grid());
    ReconstructionConfig cfg;
    cfg.tol = 1e-10;
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(f, fr, cfg));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

}  // namespace
