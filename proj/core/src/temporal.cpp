#include "zoomv/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace zoomv {

std::string_view branch_name(Branch b) {
    switch (b) {
        case Branch::begin: return "begin";
        case Branch::mid: return "mid";
        case Branch::end: return "end";
    }
    return "?";
}

std::vector<Seconds> uniform_sample(Seconds duration, int n) {
    if (n < 1) {
        throw std::invalid_argument("uniform_sample: n must be >= 1");
    }
    if (duration < 0) {
        throw std::invalid_argument("uniform_sample: negative duration");
    }
    std::vector<Seconds> times;
    times.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        times.push_back(0.0);
        return times;
    }
    for (int i = 0; i < n; ++i) {
        times.push_back(static_cast<Seconds>(i) * duration / (n - 1));
    }
    times.back() = duration;  // kill rounding drift at the inclusive endpoint
    return times;
}

long long round_half_up(Seconds t) {
    return static_cast<long long>(std::floor(t + 0.5));
}

int pad_width_for(Seconds duration) {
    long long v = round_half_up(duration);
    int digits = 1;
    while (v >= 10) {
        v /= 10;
        ++digits;
    }
    return digits;
}

QuantizedTimestamp quantize(Seconds t, int pad_width) {
    if (pad_width < 1) {
        throw std::invalid_argument("quantize: pad_width must be >= 1");
    }
    if (t < 0 || !std::isfinite(t)) {
        throw std::invalid_argument("quantize: time must be finite and non-negative");
    }
    long long value = round_half_up(t);
    std::string digits = std::to_string(value);
    if (digits.size() > static_cast<std::size_t>(pad_width)) {
        throw std::invalid_argument("quantize: value does not fit in pad_width digits");
    }
    std::string text(static_cast<std::size_t>(pad_width) - digits.size(), '0');
    text += digits;
    return QuantizedTimestamp{value, std::move(text)};
}

std::size_t nearest_frame_index(VideoTimeline const& timeline, Seconds t) {
    auto const& ft = timeline.frame_times;
    if (ft.empty()) {
        throw std::invalid_argument("nearest_frame_index: timeline has no frames");
    }
    auto it = std::lower_bound(ft.begin(), ft.end(), t);
    if (it == ft.begin()) return 0;
    if (it == ft.end()) return ft.size() - 1;
    std::size_t hi = static_cast<std::size_t>(it - ft.begin());
    std::size_t lo = hi - 1;
    // Exact tie picks the later frame.
    return (ft[hi] - t <= t - ft[lo]) ? hi : lo;
}

TemporalWindow snap_to_frames(TemporalWindow const& w, VideoTimeline const& timeline) {
    auto const& ft = timeline.frame_times;
    return TemporalWindow{ft[nearest_frame_index(timeline, w.start)],
                          ft[nearest_frame_index(timeline, w.end)]};
}

WindowSet merge(WindowSet const& ws) {
    WindowSet out;
    out.normalized = true;
    if (ws.windows.empty()) return out;

    std::vector<TemporalWindow> sorted = ws.windows;
    std::sort(sorted.begin(), sorted.end(), [](TemporalWindow const& a, TemporalWindow const& b) {
        return a.start < b.start || (a.start == b.start && a.end < b.end);
    });

    TemporalWindow cur = sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        TemporalWindow const& w = sorted[i];
        if (w.start <= cur.end + kTimeEps) {
            cur.end = std::max(cur.end, w.end);
        } else {
            out.windows.push_back(cur);
            cur = w;
        }
    }
    out.windows.push_back(cur);
    return out;
}

WindowSet calibrate_annotations(WindowSet const& ws, VideoTimeline const& timeline) {
    WindowSet snapped;
    snapped.windows.reserve(ws.windows.size());
    for (TemporalWindow const& w : ws.windows) {
        snapped.windows.push_back(snap_to_frames(w, timeline));
    }
    return merge(snapped);
}

Seconds covered_measure(WindowSet const& ws) {
    WindowSet m = ws.normalized ? ws : merge(ws);
    Seconds total = 0;
    for (TemporalWindow const& w : m.windows) total += w.length();
    return total;
}

double iou(TemporalWindow const& a, TemporalWindow const& b) {
    double inter = std::min(a.end, b.end) - std::max(a.start, b.start);
    if (inter < 0) inter = 0;
    double uni = a.length() + b.length() - inter;
    if (uni <= kTimeEps) {
        // Zero-measure union: identical degenerate windows count as a match.
        return (std::abs(a.start - b.start) <= kTimeEps &&
                std::abs(a.end - b.end) <= kTimeEps)
                   ? 1.0
                   : 0.0;
    }
    return inter / uni;
}

std::array<SegmentInterval, 3> split_segment(SegmentInterval const& seg, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("split_segment: ratio must be in (0, 1]");
    }
    Seconds len = seg.length() * ratio;
    Seconds center = (seg.start + seg.end) / 2.0;

    auto child = [&](Seconds s, Seconds e, Branch b) {
        SegmentInterval c;
        c.start = s;
        c.end = e;
        c.depth = seg.depth + 1;
        c.lineage = seg.lineage;
        c.lineage.push_back(b);
        return c;
    };
    return {child(seg.start, seg.start + len, Branch::begin),
            child(center - len / 2.0, center + len / 2.0, Branch::mid),
            child(seg.end - len, seg.end, Branch::end)};
}

std::string format_windows(WindowSet const& ws) {
    if (ws.windows.empty()) return "[]";
    std::string out = "[";
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        if (i) out += ", ";
        out += "[";
        out += std::to_string(round_half_up(ws.windows[i].start));
        out += ", ";
        out += std::to_string(round_half_up(ws.windows[i].end));
        out += "]";
    }
    out += "]";
    return out;
}

std::string format_windows_precise(WindowSet const& ws) {
    if (ws.windows.empty()) return "[]";
    char buf[64];
    std::string out = "[";
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        if (i) out += ", ";
        out += "[";
        std::snprintf(buf, sizeof(buf), "%.17g", ws.windows[i].start);
        out += buf;
        out += ", ";
        std::snprintf(buf, sizeof(buf), "%.17g", ws.windows[i].end);
        out += buf;
        out += "]";
    }
    out += "]";
    return out;
}

VideoTimeline make_timeline(Seconds duration, double frame_interval) {
    if (frame_interval <= 0) {
        throw std::invalid_argument("make_timeline: frame_interval must be positive");
    }
    VideoTimeline tl;
    tl.duration = duration;
    for (Seconds t = 0; t <= duration + kTimeEps; t += frame_interval) {
        tl.frame_times.push_back(std::min(t, duration));
    }
    return tl;
}

VideoTimeline uniform_timeline(Seconds duration, int n_frames) {
    return VideoTimeline{duration, uniform_sample(duration, n_frames)};
}

}  // namespace zoomv
