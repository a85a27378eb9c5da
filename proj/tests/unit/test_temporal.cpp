#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "zoomv/rng.hpp"
#include "zoomv/temporal.hpp"

using namespace zoomv;

namespace {

// Frame times from the worked calibration example: mostly 3 s apart with an
// irregular 4 s gap, ending ...67,70,73,77,80,83,86,89.
VideoTimeline calibration_timeline() {
    VideoTimeline tl;
    tl.duration = 89;
    for (int t = 0; t <= 63; t += 3) tl.frame_times.push_back(t);
    for (int t : {67, 70, 73, 77, 80, 83, 86, 89}) tl.frame_times.push_back(t);
    return tl;
}

WindowSet make_windows(std::initializer_list<TemporalWindow> ws) {
    WindowSet out;
    out.windows = ws;
    return out;
}

// Independent union-measure oracle: mark a half-second grid and count covered
// cells. Exact for integer-endpoint windows.
double grid_union_measure(WindowSet const& ws, double lo, double hi) {
    double const step = 0.5;
    double covered = 0;
    for (double x = lo; x < hi; x += step) {
        double mid = x + step / 2;
        for (TemporalWindow const& w : ws.windows) {
            if (mid >= w.start && mid <= w.end) {
                covered += step;
                break;
            }
        }
    }
    return covered;
}

}  // namespace

TEST_CASE("uniform_sample endpoints and spacing") {
    std::vector<Seconds> t = uniform_sample(10.0, 4);
    REQUIRE(t.size() == 4);
    CHECK(t[0] == doctest::Approx(0.0));
    CHECK(t[1] == doctest::Approx(10.0 / 3));
    CHECK(t[2] == doctest::Approx(20.0 / 3));
    CHECK(t[3] == doctest::Approx(10.0));

    CHECK(uniform_sample(10.0, 1) == std::vector<Seconds>{0.0});

    std::vector<Seconds> long_video = uniform_sample(89.0, 30);
    CHECK(long_video[0] == doctest::Approx(0.0));
    CHECK(long_video[1] == doctest::Approx(89.0 / 29));
    CHECK(long_video[2] == doctest::Approx(178.0 / 29));
    CHECK(long_video.back() == 89.0);

    CHECK_THROWS_AS(uniform_sample(10.0, 0), std::invalid_argument);
}

TEST_CASE("quantize pads and rounds half-up") {
    CHECK(quantize(6.67, 2).text == "07");
    CHECK(quantize(3.33, 2).text == "03");
    CHECK(quantize(0.0, 2).text == "00");
    CHECK(quantize(10.0, 2).text == "10");
    CHECK(quantize(2.5, 2).text == "03");  // half rounds up
    CHECK(quantize(89.0, 4).text == "0089");
    CHECK(quantize(7.0, 2).value == 7);
    CHECK_THROWS_AS(quantize(100.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(quantize(-1.0, 2), std::invalid_argument);
}

TEST_CASE("quantize stays within half a second of the input") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        double t = rng.uniform(0, 9999);
        QuantizedTimestamp q = quantize(t, 4);
        CHECK(std::abs(static_cast<double>(q.value) - t) <= 0.5);
        CHECK(q.text.size() == 4);
    }
}

TEST_CASE("pad width follows the duration's digit count") {
    CHECK(pad_width_for(10.0) == 2);
    CHECK(pad_width_for(89.0) == 2);
    CHECK(pad_width_for(1200.0) == 4);
    CHECK(pad_width_for(0.0) == 1);
    CHECK(pad_width_for(99.5) == 3);  // rounds to 100
}

TEST_CASE("snap_to_frames matches the calibration example") {
    VideoTimeline tl = calibration_timeline();
    CHECK(snap_to_frames(TemporalWindow{72, 82}, tl) == TemporalWindow{73, 83});
    CHECK(snap_to_frames(TemporalWindow{84, 89}, tl) == TemporalWindow{83, 89});
    CHECK(snap_to_frames(TemporalWindow{73, 73}, tl) == TemporalWindow{73, 73});
}

TEST_CASE("snap picks the closest frame, later on ties") {
    VideoTimeline tl{10, {0, 2, 4, 10}};
    // 3 is equidistant from 2 and 4.
    CHECK(snap_to_frames(TemporalWindow{3, 3}, tl) == TemporalWindow{4, 4});
    CHECK(snap_to_frames(TemporalWindow{0.9, 9}, tl) == TemporalWindow{0, 10});

    // Brute-force nearest over random probes.
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        double t = rng.uniform(-1, 11);
        std::size_t idx = nearest_frame_index(tl, t);
        double best = 1e9;
        for (double f : tl.frame_times) best = std::min(best, std::abs(f - t));
        CHECK(std::abs(tl.frame_times[idx] - t) == doctest::Approx(best));
    }
}

TEST_CASE("merge joins overlapping and touching windows") {
    WindowSet merged = merge(make_windows({{73, 83}, {83, 89}}));
    REQUIRE(merged.size() == 1);
    CHECK(merged.windows[0] == TemporalWindow{73, 89});
    CHECK(merged.normalized);

    CHECK(merge(WindowSet{}).empty());

    WindowSet overlapping = merge(make_windows({{5, 12}, {0, 6}, {20, 25}}));
    REQUIRE(overlapping.size() == 2);
    CHECK(overlapping.windows[0] == TemporalWindow{0, 12});
    CHECK(overlapping.windows[1] == TemporalWindow{20, 25});
}

TEST_CASE("merge preserves covered measure and is idempotent") {
    Rng rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        WindowSet ws;
        for (int i = 0; i < 50; ++i) {
            double a = static_cast<double>(rng.uniform_int(0, 100));
            double b = static_cast<double>(rng.uniform_int(0, 100));
            if (a > b) std::swap(a, b);
            ws.windows.push_back(TemporalWindow{a, b});
        }
        WindowSet merged = merge(ws);
        CHECK(covered_measure(merged) == doctest::Approx(grid_union_measure(ws, 0, 100)));
        CHECK(merge(merged) == merged);

        // Order-insensitive: a shuffled copy merges identically.
        WindowSet shuffled = ws;
        for (std::size_t i = shuffled.windows.size(); i > 1; --i) {
            std::swap(shuffled.windows[i - 1],
                      shuffled.windows[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(i) - 1))]);
        }
        CHECK(merge(shuffled) == merged);

        for (std::size_t i = 1; i < merged.windows.size(); ++i) {
            CHECK(merged.windows[i].start > merged.windows[i - 1].end);
        }
    }
}

TEST_CASE("calibrate_annotations reproduces the worked example") {
    VideoTimeline tl = calibration_timeline();
    WindowSet calibrated = calibrate_annotations(make_windows({{72, 82}, {84, 89}}), tl);
    REQUIRE(calibrated.size() == 1);
    CHECK(calibrated.windows[0] == TemporalWindow{73, 89});
}

TEST_CASE("calibrate_annotations is a fixed point on snapped disjoint windows") {
    VideoTimeline tl = calibration_timeline();
    WindowSet already = make_windows({{3, 9}, {30, 45}});
    CHECK(calibrate_annotations(already, tl) == merge(already));
}

TEST_CASE("calibrate_annotations equals snap-then-grid-union oracle") {
    VideoTimeline tl = calibration_timeline();
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        WindowSet raw;
        for (int i = 0; i < 6; ++i) {
            double a = rng.uniform(0, 89);
            double b = rng.uniform(0, 89);
            if (a > b) std::swap(a, b);
            raw.windows.push_back(TemporalWindow{a, b});
        }
        WindowSet snapped;
        for (TemporalWindow const& w : raw.windows) {
            snapped.windows.push_back(snap_to_frames(w, tl));
        }
        CHECK(calibrate_annotations(raw, tl) == merge(snapped));
        CHECK(covered_measure(calibrate_annotations(raw, tl)) ==
              doctest::Approx(grid_union_measure(snapped, 0, 89)));
    }
}

TEST_CASE("iou handles identity, disjoint, and partial overlap") {
    CHECK(iou({0, 10}, {0, 10}) == doctest::Approx(1.0));
    CHECK(iou({0, 10}, {20, 30}) == doctest::Approx(0.0));
    CHECK(iou({0, 10}, {5, 15}) == doctest::Approx(1.0 / 3));
    CHECK(iou({5, 5}, {5, 5}) == doctest::Approx(1.0));
    CHECK(iou({5, 5}, {6, 6}) == doctest::Approx(0.0));
}

TEST_CASE("iou is symmetric and bounded") {
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        double a = rng.uniform(0, 100), b = rng.uniform(0, 100);
        double c = rng.uniform(0, 100), d = rng.uniform(0, 100);
        TemporalWindow w1{std::min(a, b), std::max(a, b)};
        TemporalWindow w2{std::min(c, d), std::max(c, d)};
        double q = iou(w1, w2);
        CHECK(q == iou(w2, w1));
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        if (w1.length() > 0) CHECK(iou(w1, w1) == doctest::Approx(1.0));
    }
}

TEST_CASE("split_segment produces overlapping equal-sized children") {
    SegmentInterval seg{0, 120, 0, {}};
    auto children = split_segment(seg, 0.5);
    CHECK(children[0].start == 0);
    CHECK(children[0].end == 60);
    CHECK(children[1].start == 30);
    CHECK(children[1].end == 90);
    CHECK(children[2].start == 60);
    CHECK(children[2].end == 120);
    for (auto const& c : children) {
        CHECK(c.depth == 1);
        CHECK(c.lineage.size() == 1);
    }
    CHECK(children[0].lineage[0] == Branch::begin);
    CHECK(children[1].lineage[0] == Branch::mid);
    CHECK(children[2].lineage[0] == Branch::end);
}

TEST_CASE("split_segment at ratio one third tiles without overlap") {
    SegmentInterval seg{0, 120, 0, {}};
    auto children = split_segment(seg, 1.0 / 3);
    CHECK(children[0].end == doctest::Approx(40));
    CHECK(children[1].start == doctest::Approx(40));
    CHECK(children[1].end == doctest::Approx(80));
    CHECK(children[2].start == doctest::Approx(80));
}

TEST_CASE("two split levels quarter the segment length") {
    SegmentInterval seg{0, 1200, 0, {}};
    for (auto const& child : split_segment(seg, 0.5)) {
        for (auto const& grandchild : split_segment(child, 0.5)) {
            CHECK(grandchild.length() == doctest::Approx(300));
            CHECK(grandchild.depth == 2);
            CHECK(grandchild.lineage.size() == 2);
        }
    }
}

TEST_CASE("split children cover the parent exactly for ratio >= 1/3") {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        double s = rng.uniform(0, 500);
        double e = s + rng.uniform(1, 1000);
        double ratio = rng.uniform(1.0 / 3, 1.0);
        SegmentInterval seg{s, e, 0, {}};
        auto children = split_segment(seg, ratio);
        WindowSet cover;
        for (auto const& c : children) cover.windows.push_back(TemporalWindow{c.start, c.end});
        WindowSet merged = merge(cover);
        REQUIRE(merged.size() == 1);
        CHECK(merged.windows[0].start == doctest::Approx(s));
        CHECK(merged.windows[0].end == doctest::Approx(e));
    }
    CHECK_THROWS_AS(split_segment(SegmentInterval{0, 10, 0, {}}, 0.0), std::invalid_argument);
}

TEST_CASE("window sets serialize to the bracketed integer form") {
    CHECK(format_windows(make_windows({{72, 82}, {84, 89}})) == "[[72, 82], [84, 89]]");
    CHECK(format_windows(WindowSet{}) == "[]");
    CHECK(format_windows(make_windows({{72.4, 82.5}})) == "[[72, 83]]");
}

TEST_CASE("precise serialization round-trips through the parser text form") {
    WindowSet ws = make_windows({{10.0 / 3, 89.0 / 7}});
    std::string text = format_windows_precise(ws);
    CHECK(text.find("[[") == 0);
    // strtod of %.17g recovers the exact doubles
    double a = std::strtod(text.c_str() + 2, nullptr);
    CHECK(a == 10.0 / 3);
}

TEST_CASE("make_timeline covers the duration at the requested rate") {
    VideoTimeline tl = make_timeline(10, 1.0);
    CHECK(tl.frame_times.size() == 11);
    CHECK(tl.frame_times.front() == 0);
    CHECK(tl.frame_times.back() == doctest::Approx(10));
    CHECK(std::is_sorted(tl.frame_times.begin(), tl.frame_times.end()));
}
