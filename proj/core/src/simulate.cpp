#include "zoomv/simulate.hpp"

#include <cstdio>

#include "zoomv/eval.hpp"
#include "zoomv/oracle_backend.hpp"
#include "zoomv/rng.hpp"

namespace zoomv {

std::vector<SweepInstance> sweep_instances(SweepSpec const& spec) {
    Rng rng(substream(spec.seed, "sweep"));
    std::vector<SweepInstance> instances;
    instances.reserve(static_cast<std::size_t>(spec.n_videos));
    for (int i = 0; i < spec.n_videos; ++i) {
        SweepInstance inst;
        inst.duration = rng.uniform(spec.min_duration, spec.max_duration);
        Seconds len = rng.uniform(0.02, 0.2) * inst.duration;
        Seconds start = rng.uniform(0.0, inst.duration - len);
        inst.truth = TemporalWindow{start, start + len};
        instances.push_back(inst);
    }
    return instances;
}

namespace {

OracleSpec oracle_for(SweepSpec const& spec, SweepInstance const& inst, std::size_t index) {
    OracleSpec o;
    o.ground_truth.windows.push_back(inst.truth);
    o.ground_truth.normalized = true;
    o.window_noise_sigma = spec.window_noise_sigma;
    o.calib_slope = spec.calib_slope;
    o.calib_intercept = spec.calib_intercept;
    o.seed = mix_seed(substream(spec.seed, "oracle"), index);
    return o;
}

}  // namespace

std::vector<SweepCell> run_sweep(SweepSpec const& spec) {
    std::vector<SweepInstance> instances = sweep_instances(spec);
    std::vector<SweepCell> cells;
    cells.reserve(spec.epsilons.size() * spec.deltas.size());

    for (double epsilon : spec.epsilons) {
        for (double delta : spec.deltas) {
            SweepCell cell;
            cell.epsilon = epsilon;
            cell.delta = delta;
            SearchConfig config = spec.base;
            config.epsilon = epsilon;
            config.delta = delta;
            for (std::size_t i = 0; i < instances.size(); ++i) {
                SweepInstance const& inst = instances[i];
                OracleBackend backend(oracle_for(spec, inst, i));
                VideoTimeline timeline = make_timeline(inst.duration, 1.0);
                SearchResult result = hierarchical_search(
                    timeline, SearchQuery{"sweep query", {}}, backend, config);
                WindowSet truth;
                truth.windows.push_back(inst.truth);
                cell.mean_steps += result.steps;
                cell.mean_iou +=
                    sample_iou(result.best_windows, truth, TopOneRule::longest_window);
                cell.mean_cost_ms += result.modeled_cost_ms;
            }
            double n = static_cast<double>(instances.size());
            cell.mean_steps /= n;
            cell.mean_iou /= n;
            cell.mean_cost_ms /= n;
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string sweep_csv(std::vector<SweepCell> const& cells) {
    std::string out = "epsilon,delta,mean_steps,mean_iou,mean_cost_ms\n";
    char buf[160];
    for (SweepCell const& c : cells) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.1f,%.4f,%.4f,%.1f\n", c.epsilon, c.delta,
                      c.mean_steps, c.mean_iou, c.mean_cost_ms);
        out += buf;
    }
    return out;
}

std::vector<std::pair<double, double>> collect_confidence_iou_pairs(
    int n_videos, std::uint64_t seed, double window_noise_sigma, SearchConfig const& config,
    double min_duration, double max_duration) {
    SweepSpec spec;
    spec.n_videos = n_videos;
    spec.seed = seed;
    spec.window_noise_sigma = window_noise_sigma;
    spec.min_duration = min_duration;
    spec.max_duration = max_duration;
    spec.base = config;

    std::vector<std::pair<double, double>> pairs;
    std::vector<SweepInstance> instances = sweep_instances(spec);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        SweepInstance const& inst = instances[i];
        OracleBackend backend(oracle_for(spec, inst, i));
        VideoTimeline timeline = make_timeline(inst.duration, 1.0);
        SearchResult result =
            hierarchical_search(timeline, SearchQuery{"calibration query", {}}, backend,
                                config);
        WindowSet truth;
        truth.windows.push_back(inst.truth);
        pairs.emplace_back(result.best_confidence,
                           sample_iou(result.best_windows, truth, TopOneRule::longest_window));
    }
    return pairs;
}

}  // namespace zoomv
