#include "zoomv/oracle_backend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zoomv/rng.hpp"

namespace zoomv {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

WindowSet intersect_with_segment(WindowSet const& ws, SegmentInterval const& segment) {
    WindowSet out;
    for (TemporalWindow const& w : ws.windows) {
        Seconds s = std::max(w.start, segment.start);
        Seconds e = std::min(w.end, segment.end);
        if (e - s > kTimeEps) {
            out.windows.push_back(TemporalWindow{s, e});
        }
    }
    return merge(out);
}

namespace {

std::uint64_t call_seed(OracleSpec const& spec, SegmentInterval const& segment,
                        std::string const& query) {
    std::uint64_t s = spec.seed;
    s = hash_double(s, segment.start);
    s = hash_double(s, segment.end);
    return hash_bytes(s, query);
}

}  // namespace

GroundingResult oracle_ground(OracleSpec const& spec, SegmentInterval const& segment,
                              std::string const& query) {
    Rng rng(call_seed(spec, segment, query));
    WindowSet hit = intersect_with_segment(spec.ground_truth, segment);

    WindowSet produced;
    if (!hit.empty()) {
        for (TemporalWindow const& w : hit.windows) {
            Seconds s = w.start + spec.window_noise_sigma * rng.gauss();
            Seconds e = w.end + spec.window_noise_sigma * rng.gauss();
            if (s > e) std::swap(s, e);
            s = std::clamp(s, segment.start, segment.end);
            e = std::clamp(e, segment.start, segment.end);
            produced.windows.push_back(TemporalWindow{s, e});
        }
    } else {
        // No truth in view: emit a plausible-looking distractor window.
        Seconds a = rng.uniform(segment.start, segment.end);
        Seconds b = rng.uniform(segment.start, segment.end);
        if (a > b) std::swap(a, b);
        produced.windows.push_back(TemporalWindow{a, b});
    }

    GroundingResult result;
    result.raw_text = format_windows_precise(merge(produced));
    result.windows = parse_windows(result.raw_text, segment);
    return result;
}

namespace {

double best_overlap(OracleSpec const& spec, SegmentInterval const& segment,
                    WindowSet const& proposed) {
    WindowSet truth = intersect_with_segment(spec.ground_truth, segment);
    double q = 0;
    for (TemporalWindow const& p : proposed.windows) {
        for (TemporalWindow const& t : truth.windows) {
            q = std::max(q, iou(p, t));
        }
    }
    return q;
}

}  // namespace

Confidence oracle_reflect(OracleSpec const& spec, SegmentInterval const& segment,
                          WindowSet const& proposed) {
    double q = best_overlap(spec, segment, proposed);
    double p_yes = logistic(spec.calib_slope * q + spec.calib_intercept);
    return yes_confidence(p_yes, 1.0 - p_yes);
}

Confidence oracle_reflect_mc(OracleSpec const& spec, SegmentInterval const& segment,
                             WindowSet const& proposed,
                             std::vector<PromptOption> const& options) {
    if (options.empty()) {
        throw std::invalid_argument("oracle_reflect_mc: no options");
    }
    double q = best_overlap(spec, segment, proposed);
    double p_correct = logistic(spec.calib_slope * q + spec.calib_intercept);
    std::map<std::string, double> dist;
    double p_other = options.size() > 1
                         ? (1.0 - p_correct) / static_cast<double>(options.size() - 1)
                         : 0.0;
    bool has_correct = false;
    for (PromptOption const& o : options) {
        has_correct = has_correct || o.label == spec.correct_label;
        dist[o.label] = o.label == spec.correct_label ? p_correct : p_other;
    }
    if (!has_correct) {
        // Truth label not offered: uniform ignorance.
        for (auto& [label, p] : dist) p = 1.0 / static_cast<double>(options.size());
    }
    return mc_confidence(dist);
}

GroundingResult OracleBackend::ground(PromptSpec const& prompt, SegmentInterval const& segment) {
    return oracle_ground(spec_, segment, prompt.query);
}

Confidence OracleBackend::reflect(PromptSpec const& prompt, SegmentInterval const& segment) {
    WindowSet proposed = prompt.prior_windows ? *prompt.prior_windows : WindowSet{};
    if (prompt.task == PromptTask::reflect_mc) {
        return oracle_reflect_mc(spec_, segment, proposed, prompt.options);
    }
    return oracle_reflect(spec_, segment, proposed);
}

std::string OracleBackend::answer(PromptSpec const& prompt) {
    // Correct whenever the spotlighted clip overlaps the truth well enough.
    SegmentInterval whole;
    whole.end = std::numeric_limits<double>::max();
    WindowSet clip = prompt.prior_windows ? *prompt.prior_windows : WindowSet{};
    double q = best_overlap(spec_, whole, clip);
    std::string label = spec_.correct_label;
    if (q < spec_.answer_iou_threshold) {
        label = "?";
        for (PromptOption const& o : prompt.options) {
            if (o.label != spec_.correct_label) {
                label = o.label;
                break;
            }
        }
    }
    return "The answer is " + label + ".";
}

}  // namespace zoomv
