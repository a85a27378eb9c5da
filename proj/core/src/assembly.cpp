#include "zoomv/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zoomv {

std::vector<int> allocate(WindowSet const& windows, int budget) {
    if (budget < 0) {
        throw std::invalid_argument("allocate: negative budget");
    }
    std::size_t const k = windows.size();
    std::vector<int> counts(k, 0);
    if (k == 0 || budget == 0) return counts;

    Seconds total_len = 0;
    for (TemporalWindow const& w : windows.windows) total_len += w.length();

    int reserved = 0;
    if (budget >= static_cast<int>(k)) {
        // Every window keeps at least one frame; the rest goes by duration.
        counts.assign(k, 1);
        reserved = static_cast<int>(k);
    }
    int remaining = budget - reserved;
    if (remaining <= 0) return counts;

    if (total_len <= kTimeEps) {
        // All windows degenerate: nothing beyond the reserved frame each.
        return counts;
    }

    std::vector<double> quota(k);
    std::vector<int> base(k);
    int assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        quota[i] = remaining * windows.windows[i].length() / total_len;
        base[i] = static_cast<int>(std::floor(quota[i]));
        assigned += base[i];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return quota[a] - base[a] > quota[b] - base[b];
    });
    int leftover = remaining - assigned;  // < k: one unit per largest remainder
    for (int j = 0; j < leftover; ++j) ++base[order[static_cast<std::size_t>(j)]];
    for (std::size_t i = 0; i < k; ++i) counts[i] += base[i];
    return counts;
}

std::vector<FrameRef> sample_segment_frames(VideoTimeline const& timeline, Seconds start,
                                            Seconds end, int n, int visual_tokens) {
    std::vector<FrameRef> frames;
    if (n <= 0) return frames;
    std::vector<Seconds> offsets = uniform_sample(std::max(0.0, end - start), n);
    frames.reserve(offsets.size());
    for (Seconds off : offsets) {
        std::size_t idx = nearest_frame_index(timeline, start + off);
        if (!frames.empty() && frames.back().timeline_index == idx) continue;
        frames.push_back(FrameRef{timeline.frame_times[idx], idx, visual_tokens, {}});
    }
    return frames;
}

std::vector<FrameRef> sample_window_frames(VideoTimeline const& timeline,
                                           WindowSet const& windows, int budget,
                                           int visual_tokens) {
    std::vector<int> counts = allocate(windows, budget);
    std::vector<FrameRef> frames;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (counts[i] == 0) continue;
        std::vector<FrameRef> w = sample_segment_frames(
            timeline, windows.windows[i].start, windows.windows[i].end, counts[i], visual_tokens);
        frames.insert(frames.end(), w.begin(), w.end());
    }
    // Windows are normalized (sorted, disjoint), so concatenation is already
    // in time order; collapse duplicates across adjacent window boundaries.
    frames.erase(std::unique(frames.begin(), frames.end(),
                             [](FrameRef const& a, FrameRef const& b) {
                                 return a.timeline_index == b.timeline_index;
                             }),
                 frames.end());
    return frames;
}

AssembledInput assemble(VideoTimeline const& timeline, WindowSet const& windows,
                        AssemblyConfig const& config, int pad_width) {
    if (config.global_frames < 1) {
        throw std::invalid_argument("assemble: global_frames must be >= 1");
    }
    WindowSet sources = windows.normalized ? windows : merge(windows);

    AssembledInput out;
    out.source_windows = sources;
    std::vector<FrameRef> global_frames = sample_segment_frames(
        timeline, 0, timeline.duration, config.global_frames, config.visual_tokens_per_frame);
    out.global = link(global_frames, pad_width, SequenceRole::global);

    std::vector<FrameRef> spot =
        sample_window_frames(timeline, sources, config.spotlight_frames_max,
                             config.visual_tokens_per_frame);
    // No double charging: a spotlight frame that (almost) coincides with a
    // global frame adds nothing.
    std::erase_if(spot, [&](FrameRef const& f) {
        for (FrameRef const& g : global_frames) {
            if (std::abs(g.time - f.time) <= config.dedupe_tolerance) return true;
        }
        return false;
    });
    if (!spot.empty()) {
        out.spotlight = link(spot, pad_width, SequenceRole::spotlight);
    } else {
        out.spotlight.pad_width = pad_width;
        out.spotlight.role = SequenceRole::spotlight;
    }
    return out;
}

}  // namespace zoomv
