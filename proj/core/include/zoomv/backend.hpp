#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "zoomv/temporal.hpp"
#include "zoomv/temporalink.hpp"

namespace zoomv {

enum class CallKind { ground, reflect_yesno, reflect_mc, answer };

std::string_view call_kind_name(CallKind kind);

// One inference round-trip, with the frame counts the cost model charges.
// frames_uncached <= frames_total; the difference is the prompt prefix a
// cache-aware serving stack does not re-encode.
struct BackendCall {
    CallKind kind{CallKind::ground};
    PromptSpec prompt;
    int frames_total{0};
    int frames_uncached{0};
};

// Raw model text plus its parsed, segment-clamped window set.
struct GroundingResult {
    std::string raw_text;
    WindowSet windows;
};

enum class ConfidenceMode { yesno, multiple_choice };

// Reflection confidence in [0,1]. For multiple choice, `value` is the maximum
// of `option_distribution` and the distribution sums to <= 1. `degenerate`
// marks zero-information inputs (no probability mass observed).
struct Confidence {
    double value{0};
    ConfidenceMode mode{ConfidenceMode::yesno};
    std::map<std::string, double> option_distribution;
    bool degenerate{false};
};

// Extract every bracketed numeric pair "[s, e]" from model output. Pairs with
// s > e are dropped; survivors are clamped to the segment (pairs that do not
// intersect it at all are dropped) and merged. Never throws: unparseable text
// yields an empty set, which upstream treats as zero confidence.
WindowSet parse_windows(std::string const& raw, SegmentInterval const& segment);

enum class YesNoEstimator {
    pair_normalized,  // p_yes / (p_yes + p_no) when both masses observed
    raw_yes,          // the raw Yes-token probability
};

// Yes/No reflection confidence from first-token masses. When p_no is absent
// the raw Yes mass is used regardless of estimator. Zero total mass yields a
// degenerate zero confidence.
Confidence yes_confidence(double p_yes, std::optional<double> p_no,
                          YesNoEstimator estimator = YesNoEstimator::pair_normalized);

// Multiple-choice confidence: the maximum option probability, distribution
// retained. Throws std::invalid_argument on an empty map.
Confidence mc_confidence(std::map<std::string, double> const& option_probs);

// Endpoint unreachable after all retry attempts.
struct BackendUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Response arrived but is not valid protocol JSON.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Response is well-formed but lacks the requested token probabilities; the
// caller may fall back to sampling-frequency estimation.
struct ProtocolDegraded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Abstract inference surface. Implementations must be safely shareable across
// concurrent query pipelines; each individual search issues its calls
// sequentially.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    virtual GroundingResult ground(PromptSpec const& prompt, SegmentInterval const& segment) = 0;
    virtual Confidence reflect(PromptSpec const& prompt, SegmentInterval const& segment) = 0;
    virtual std::string answer(PromptSpec const& prompt) = 0;
};

}  // namespace zoomv
