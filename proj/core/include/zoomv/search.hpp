#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zoomv/backend.hpp"
#include "zoomv/cost_model.hpp"
#include "zoomv/temporal.hpp"

namespace zoomv {

// Hierarchical-search knobs. epsilon is the confidence stop threshold, delta
// the minimum sub-event duration worth splitting into, split_ratio the child
// length as a fraction of the parent (1/2 by default: 50% neighbour overlap,
// one extra tree level per halving of delta).
struct SearchConfig {
    double epsilon{0.8};
    double delta{600.0};
    double split_ratio{0.5};
    int frames_per_node{64};
    int reflect_detail_frames{16};  // extra frames re-encoded for reflection
    int max_steps{32};              // guard for misbehaving backends
    bool prefix_cache{true};
    CostTable cost_table{CostTable::defaults()};

    // epsilon 0.8, delta 600 s: accuracy-oriented.
    static SearchConfig quality() { return SearchConfig{}; }
    // epsilon 0.5, delta 1200 s: latency-oriented, stops after very few steps.
    static SearchConfig fast() {
        SearchConfig c;
        c.epsilon = 0.5;
        c.delta = 1200.0;
        return c;
    }
};

// A query plus its answer options; no options means open-ended, which selects
// Yes/No reflection instead of multiple-choice.
struct SearchQuery {
    std::string text;
    std::vector<PromptOption> options;

    bool open_ended() const { return options.empty(); }
};

// One explored sub-event: its grounded windows and reflection confidence.
struct SegmentNode {
    SegmentInterval interval;
    WindowSet windows;
    Confidence confidence;
    int insertion_order{0};
};

enum class TraceAction { expand, dequeue, update_best, stop, prune_too_short };

std::string_view trace_action_name(TraceAction a);

struct TraceRecord {
    int step{0};  // spotlight-reflect invocations so far
    TraceAction action{TraceAction::expand};
    SegmentInterval interval;
    WindowSet windows;
    double confidence{0};
    double ground_cost_ms{0};
    double reflect_cost_ms{0};
    int frames_ground{0};
    int frames_reflect_total{0};
    int frames_reflect_uncached{0};
    std::string annotation;
};

enum class Termination { epsilon, queue_exhausted, max_steps };

std::string_view termination_name(Termination t);

// Append-only record of one search, replayable without the backend.
struct SearchTrace {
    // header
    Seconds video_duration{0};
    std::size_t frame_count{0};
    std::string query;
    SearchConfig config;
    // body
    std::vector<TraceRecord> records;
    // footer (present when the search ran to completion)
    bool complete{false};
};

struct SearchResult {
    WindowSet best_windows;
    double best_confidence{0};
    int steps{0};           // grounding/reflection call pairs issued
    int nodes_expanded{0};  // dequeued nodes whose children were generated
    Termination terminated_by{Termination::queue_exhausted};
    double modeled_cost_ms{0};
    SearchTrace trace;
};

// Result of grounding + reflecting one segment.
struct ReflectOutcome {
    WindowSet windows;
    Confidence confidence;
    int frames_ground{0};
    int frames_reflect_total{0};
    int frames_reflect_uncached{0};
    double ground_cost_ms{0};
    double reflect_cost_ms{0};
    std::string annotation;
};

// Sample frames_per_node frames uniformly inside the segment, ground the query
// against them, then score the proposal by self-reflection (Yes/No for
// open-ended queries, multiple-choice otherwise). An empty parse yields
// confidence 0 without a reflection call; a degraded probability report falls
// back to text sampling with an annotation.
ReflectOutcome spotlight_reflect(SegmentInterval const& segment, SearchQuery const& query,
                                 ModelBackend& backend, SearchConfig const& config,
                                 VideoTimeline const& timeline);

// Best-first search over begin/mid/end sub-events, prioritized by reflection
// confidence, stopping at the first dequeue with confidence >= epsilon.
// Segments shorter than delta are not split further. Ties dequeue in insertion
// order. Throws std::invalid_argument on a non-positive duration.
SearchResult hierarchical_search(VideoTimeline const& timeline, SearchQuery const& query,
                                 ModelBackend& backend, SearchConfig const& config);

// Recompute a SearchResult purely from a recorded trace (no backend). Throws
// std::invalid_argument when the trace is truncated or incomplete.
SearchResult replay(SearchTrace const& trace);

// Line-delimited JSON persistence: one header record, one record per action,
// one result footer. Schema is versioned (see docs/protocol.md).
void write_trace(SearchResult const& result, std::ostream& out);
SearchTrace read_trace(std::istream& in);

}  // namespace zoomv
