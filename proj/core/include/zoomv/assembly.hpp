#pragma once

#include <vector>

#include "zoomv/temporal.hpp"
#include "zoomv/temporalink.hpp"

namespace zoomv {

struct AssemblyConfig {
    int global_frames{64};
    int spotlight_frames_max{16};
    double dedupe_tolerance{0.5};  // half the quantization granularity
    int visual_tokens_per_frame{170};
};

// The compact final input: sparse global coverage plus dense frames inside the
// winning windows, spotlight strictly after global.
struct AssembledInput {
    LinkedFrameSequence global;
    LinkedFrameSequence spotlight;  // entries may be empty
    WindowSet source_windows;

    long long total_frames() const {
        return static_cast<long long>(global.entries.size() + spotlight.entries.size());
    }
};

// Split a frame budget across windows proportionally to duration, using
// largest-remainder rounding. Every positive-length window receives at least
// one frame when the budget covers the window count; the total never exceeds
// the budget. Deterministic (remainder ties favour earlier windows).
std::vector<int> allocate(WindowSet const& windows, int budget);

// n frames uniformly placed in [start, end], snapped to the timeline (ties to
// the later frame) with duplicate frames collapsed.
std::vector<FrameRef> sample_segment_frames(VideoTimeline const& timeline, Seconds start,
                                            Seconds end, int n, int visual_tokens);

// Budgeted dense sampling inside the windows: allocate() per window, then
// uniform within each, concatenated in time order.
std::vector<FrameRef> sample_window_frames(VideoTimeline const& timeline,
                                           WindowSet const& windows, int budget,
                                           int visual_tokens);

// Build the final input: global_frames uniform over the whole video, then up
// to spotlight_frames_max frames inside `windows`, dropping spotlight frames
// that fall within dedupe_tolerance of a global frame.
AssembledInput assemble(VideoTimeline const& timeline, WindowSet const& windows,
                        AssemblyConfig const& config, int pad_width);

}  // namespace zoomv
