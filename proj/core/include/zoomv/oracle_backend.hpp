#pragma once

#include <cstdint>
#include <string>

#include "zoomv/backend.hpp"

namespace zoomv {

// Deterministic test double for a grounded LVLM. It hides a ground-truth
// window set and answers every call as a function of (seed, segment, inputs)
// only, so runs replay bit-identically. Reflection confidence follows a
// logistic curve in the proposal's overlap with the truth, i.e. confidence
// rises monotonically with grounding quality.
struct OracleSpec {
    WindowSet ground_truth;
    double window_noise_sigma{0};   // seconds of Gaussian jitter per endpoint
    double calib_slope{10.0};       // a in logistic(a * iou + b)
    double calib_intercept{-5.0};   // b
    double answer_iou_threshold{0.5};
    std::string correct_label{"A"};
    std::uint64_t seed{0};
};

// Ground-truth windows clipped to the segment; zero-measure slivers dropped.
WindowSet intersect_with_segment(WindowSet const& ws, SegmentInterval const& segment);

// Simulated grounding: GT ∩ segment with per-endpoint noise, clamped back to
// the segment; a seeded random window inside the segment when GT misses it.
// raw_text is a lossless serialization and windows == parse_windows(raw_text).
GroundingResult oracle_ground(OracleSpec const& spec, SegmentInterval const& segment,
                              std::string const& query);

// Yes/No reflection: logistic(a * q + b) where q is the best IoU between the
// proposed windows and GT ∩ segment (0 when GT misses the segment or the
// proposal is empty).
Confidence oracle_reflect(OracleSpec const& spec, SegmentInterval const& segment,
                          WindowSet const& proposed);

// Multiple-choice reflection: the correct label carries the logistic mass,
// the remainder is spread uniformly over the other options.
Confidence oracle_reflect_mc(OracleSpec const& spec, SegmentInterval const& segment,
                             WindowSet const& proposed,
                             std::vector<PromptOption> const& options);

double logistic(double x);

class OracleBackend : public ModelBackend {
public:
    explicit OracleBackend(OracleSpec spec) : spec_(std::move(spec)) {}

    GroundingResult ground(PromptSpec const& prompt, SegmentInterval const& segment) override;
    Confidence reflect(PromptSpec const& prompt, SegmentInterval const& segment) override;
    std::string answer(PromptSpec const& prompt) override;

    OracleSpec const& spec() const { return spec_; }

private:
    OracleSpec spec_;
};

}  // namespace zoomv
