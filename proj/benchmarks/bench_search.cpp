#include <benchmark/benchmark.h>

#include "zoomv/oracle_backend.hpp"
#include "zoomv/search.hpp"

namespace {

// Full search loop against the simulated backend; measures engine overhead
// (frame sampling, prompt assembly, queue and trace bookkeeping), not model
// latency.
void BM_HierarchicalSearch(benchmark::State& state) {
    zoomv::OracleSpec spec;
    spec.ground_truth.windows.push_back(zoomv::TemporalWindow{700, 900});
    spec.ground_truth.normalized = true;
    spec.window_noise_sigma = 30.0;
    spec.seed = 13;
    zoomv::OracleBackend backend(spec);

    zoomv::VideoTimeline tl = zoomv::make_timeline(3600, 1.0);
    zoomv::SearchConfig config;
    config.epsilon = 1.0;  // exhaustive: worst case
    config.delta = static_cast<double>(state.range(0));
    config.max_steps = 1 << 14;
    zoomv::SearchQuery query{"benchmark query", {}};

    for (auto _ : state) {
        benchmark::DoNotOptimize(zoomv::hierarchical_search(tl, query, backend, config));
    }
}
BENCHMARK(BM_HierarchicalSearch)->Arg(1800)->Arg(900)->Arg(450);

void BM_SpotlightReflect(benchmark::State& state) {
    zoomv::OracleSpec spec;
    spec.ground_truth.windows.push_back(zoomv::TemporalWindow{700, 900});
    spec.ground_truth.normalized = true;
    spec.seed = 13;
    zoomv::OracleBackend backend(spec);

    zoomv::VideoTimeline tl = zoomv::make_timeline(3600, 1.0);
    zoomv::SearchConfig config;
    zoomv::SegmentInterval segment{0, 3600, 0, {}};
    zoomv::SearchQuery query{"benchmark query", {}};

    for (auto _ : state) {
        benchmark::DoNotOptimize(
            zoomv::spotlight_reflect(segment, query, backend, config, tl));
    }
}
BENCHMARK(BM_SpotlightReflect);

}  // namespace
