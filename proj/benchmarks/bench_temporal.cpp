#include <benchmark/benchmark.h>

#include "zoomv/backend.hpp"
#include "zoomv/rng.hpp"
#include "zoomv/temporal.hpp"

namespace {

zoomv::WindowSet random_windows(int n, std::uint64_t seed) {
    zoomv::Rng rng(seed);
    zoomv::WindowSet ws;
    for (int i = 0; i < n; ++i) {
        double a = rng.uniform(0, 3600);
        double b = a + rng.uniform(0, 120);
        ws.windows.push_back(zoomv::TemporalWindow{a, b});
    }
    return ws;
}

void BM_Merge(benchmark::State& state) {
    zoomv::WindowSet ws = random_windows(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(zoomv::merge(ws));
    }
}
BENCHMARK(BM_Merge)->Arg(8)->Arg(64)->Arg(512);

void BM_Calibrate(benchmark::State& state) {
    zoomv::VideoTimeline tl = zoomv::make_timeline(3600, 3.0);
    zoomv::WindowSet ws = random_windows(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(zoomv::calibrate_annotations(ws, tl));
    }
}
BENCHMARK(BM_Calibrate)->Arg(8)->Arg(64);

void BM_ParseWindows(benchmark::State& state) {
    std::string text = zoomv::format_windows(random_windows(static_cast<int>(state.range(0)), 3));
    zoomv::SegmentInterval segment{0, 3600, 0, {}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(zoomv::parse_windows(text, segment));
    }
}
BENCHMARK(BM_ParseWindows)->Arg(2)->Arg(16)->Arg(128);

void BM_UniformSample(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(zoomv::uniform_sample(3600.0, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_UniformSample)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
