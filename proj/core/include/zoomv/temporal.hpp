#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace zoomv {

// All time arithmetic is double-precision seconds from video start.
using Seconds = double;

// Absolute tolerance for time comparisons.
inline constexpr double kTimeEps = 1e-9;

// Whole-second timestamp plus its left-zero-padded text form.
// `text` always has exactly the pad width it was produced with, so every
// timestamp block in one prompt occupies the same number of tokens.
struct QuantizedTimestamp {
    long long value{0};
    std::string text;

    bool operator==(QuantizedTimestamp const&) const = default;
};

// Closed interval [start, end] in seconds, start <= end.
struct TemporalWindow {
    Seconds start{0};
    Seconds end{0};

    Seconds length() const { return end - start; }
    bool operator==(TemporalWindow const&) const = default;
};

// Ordered list of windows. When `normalized` is set the windows are sorted
// by start and pairwise disjoint: any touching or overlapping pair has been
// merged into one.
struct WindowSet {
    std::vector<TemporalWindow> windows;
    bool normalized{false};

    bool empty() const { return windows.empty(); }
    std::size_t size() const { return windows.size(); }
    bool operator==(WindowSet const& other) const { return windows == other.windows; }
};

// Video duration plus the exact instants of the decoded/sampled frames.
// frame_times is strictly increasing and bounded by duration; it is the
// ground truth for snapping and quantization.
struct VideoTimeline {
    Seconds duration{0};
    std::vector<Seconds> frame_times;
};

enum class Branch { begin, mid, end };

std::string_view branch_name(Branch b);

// A candidate sub-event of the video. depth == lineage.size(); lineage records
// the begin/mid/end choices that produced this segment from the root.
struct SegmentInterval {
    Seconds start{0};
    Seconds end{0};
    int depth{0};
    std::vector<Branch> lineage;

    Seconds length() const { return end - start; }
    bool operator==(SegmentInterval const&) const = default;
};

// n times covering [0, duration] with both endpoints included:
// t_i = i * duration / (n - 1). n == 1 yields {0}. Throws std::invalid_argument
// when n < 1.
std::vector<Seconds> uniform_sample(Seconds duration, int n);

// Round to nearest integer second, halves away from zero toward +inf.
long long round_half_up(Seconds t);

// Digit count of round_half_up(duration); the pad width that keeps every
// timestamp of one video the same token length.
int pad_width_for(Seconds duration);

// Round t to whole seconds and left-zero-pad to pad_width characters.
// Throws std::invalid_argument when the rounded value needs more digits.
QuantizedTimestamp quantize(Seconds t, int pad_width);

// Index of the frame time nearest to t; exact ties pick the later frame.
// Throws std::invalid_argument on an empty timeline.
std::size_t nearest_frame_index(VideoTimeline const& timeline, Seconds t);

// Replace both endpoints with their nearest frame time.
TemporalWindow snap_to_frames(TemporalWindow const& w, VideoTimeline const& timeline);

// Sort and merge: windows that overlap or touch at a point become one window.
// Result is normalized; total covered measure is preserved.
WindowSet merge(WindowSet const& ws);

// Full calibration pipeline: snap every window to frame times, then merge the
// overlaps the snapping may have introduced.
WindowSet calibrate_annotations(WindowSet const& ws, VideoTimeline const& timeline);

// Sum of window lengths after merging; the measure of the set union.
Seconds covered_measure(WindowSet const& ws);

// |a ∩ b| / |a ∪ b|. Two identical zero-length windows score 1; any other
// zero-measure union scores 0.
double iou(TemporalWindow const& a, TemporalWindow const& b);

// Split into three equal-sized children labelled begin/mid/end, each of length
// ratio * len(seg). begin starts at seg.start, end ends at seg.end, mid is
// centered on the midpoint; ratio > 1/3 makes neighbours overlap, ratio == 1/3
// tiles exactly. ratio must be in (0, 1].
std::array<SegmentInterval, 3> split_segment(SegmentInterval const& seg, double ratio);

// Wire form of a window set: whole-second endpoints, a single space after each
// comma, e.g. "[[72, 82], [84, 89]]". Empty set renders as "[]".
std::string format_windows(WindowSet const& ws);

// Same bracketed layout but with full double precision (%.17g); parsing the
// result recovers the exact endpoints. Used where lossless text round-trips
// matter (the simulated backend), not on the model wire.
std::string format_windows_precise(WindowSet const& ws);

// Timeline with frames at 0, step, 2*step, ... up to duration.
VideoTimeline make_timeline(Seconds duration, double frame_interval);

// Timeline whose frames are uniform_sample(duration, n_frames).
VideoTimeline uniform_timeline(Seconds duration, int n_frames);

}  // namespace zoomv
