#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zoomv/search.hpp"

namespace zoomv {

// Grid sweep over (epsilon, delta) against seeded synthetic videos with a
// simulated backend; the machinery behind the effectiveness/efficiency
// trade-off analysis.
struct SweepSpec {
    std::vector<double> epsilons{0.5, 0.8, 1.0};
    std::vector<double> deltas{300, 600, 1200, 2400};
    int n_videos{20};
    std::uint64_t seed{0};
    double min_duration{600};
    double max_duration{3600};
    double window_noise_sigma{0};
    double calib_slope{10.0};
    double calib_intercept{-5.0};
    SearchConfig base;  // split_ratio / frames / max_steps shared by all cells
};

struct SweepCell {
    double epsilon{0};
    double delta{0};
    double mean_steps{0};
    double mean_iou{0};
    double mean_cost_ms{0};
};

// Synthetic instance i of a sweep: duration and a single hidden truth window,
// all drawn from the sweep's named substream.
struct SweepInstance {
    Seconds duration{0};
    TemporalWindow truth;
};

std::vector<SweepInstance> sweep_instances(SweepSpec const& spec);

// Run every (epsilon, delta) cell over the same instances. Deterministic:
// identical spec yields identical cells.
std::vector<SweepCell> run_sweep(SweepSpec const& spec);

// Plot-ready CSV: "epsilon,delta,mean_steps,mean_iou,mean_cost_ms".
std::string sweep_csv(std::vector<SweepCell> const& cells);

// Searches over seeded noisy instances, pairing each run's best confidence
// with its achieved IoU; feeds calibration_bins.
std::vector<std::pair<double, double>> collect_confidence_iou_pairs(
    int n_videos, std::uint64_t seed, double window_noise_sigma, SearchConfig const& config,
    double min_duration, double max_duration);

}  // namespace zoomv
