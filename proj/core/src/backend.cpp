#include "zoomv/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace zoomv {

std::string_view call_kind_name(CallKind kind) {
    switch (kind) {
        case CallKind::ground: return "ground";
        case CallKind::reflect_yesno: return "reflect_yesno";
        case CallKind::reflect_mc: return "reflect_mc";
        case CallKind::answer: return "answer";
    }
    return "?";
}

namespace {

bool is_number_start(char c) {
    return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

// Parse one "[num, num]" starting at text[pos] (which is '['). On success
// advances pos past the closing bracket. Nested list brackets never match
// because their first non-space character is another '['.
bool parse_pair(std::string const& text, std::size_t& pos, double& a, double& b) {
    std::size_t p = pos + 1;
    auto skip_ws = [&] {
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    };
    skip_ws();
    if (p >= text.size() || !is_number_start(text[p])) return false;
    char const* begin = text.c_str() + p;
    char* end = nullptr;
    a = std::strtod(begin, &end);
    if (end == begin) return false;
    p += static_cast<std::size_t>(end - begin);
    skip_ws();
    if (p >= text.size() || text[p] != ',') return false;
    ++p;
    skip_ws();
    if (p >= text.size() || !is_number_start(text[p])) return false;
    begin = text.c_str() + p;
    b = std::strtod(begin, &end);
    if (end == begin) return false;
    p += static_cast<std::size_t>(end - begin);
    skip_ws();
    if (p >= text.size() || text[p] != ']') return false;
    pos = p + 1;
    return true;
}

}  // namespace

WindowSet parse_windows(std::string const& raw, SegmentInterval const& segment) {
    WindowSet out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '[') continue;
        double a = 0, b = 0;
        std::size_t pos = i;
        if (!parse_pair(raw, pos, a, b)) continue;
        i = pos - 1;
        if (std::isnan(a) || std::isnan(b)) continue;         // "nan" literals
        if (a > b) continue;                                  // inverted pair
        if (b < segment.start || a > segment.end) continue;   // no intersection
        out.windows.push_back(TemporalWindow{std::max(a, segment.start),
                                             std::min(b, segment.end)});
    }
    return merge(out);
}

Confidence yes_confidence(double p_yes, std::optional<double> p_no, YesNoEstimator estimator) {
    if (p_yes < 0 || (p_no && *p_no < 0)) {
        throw std::invalid_argument("yes_confidence: negative probability mass");
    }
    Confidence c;
    c.mode = ConfidenceMode::yesno;
    if (!p_no || estimator == YesNoEstimator::raw_yes) {
        c.value = p_yes;
        c.degenerate = p_yes == 0 && (!p_no || *p_no == 0);
        if (p_no) c.option_distribution = {{"Yes", p_yes}, {"No", *p_no}};
        return c;
    }
    double total = p_yes + *p_no;
    c.option_distribution = {{"Yes", p_yes}, {"No", *p_no}};
    if (total <= 0) {
        c.value = 0;
        c.degenerate = true;
        return c;
    }
    c.value = p_yes / total;
    return c;
}

Confidence mc_confidence(std::map<std::string, double> const& option_probs) {
    if (option_probs.empty()) {
        throw std::invalid_argument("mc_confidence: empty option distribution");
    }
    Confidence c;
    c.mode = ConfidenceMode::multiple_choice;
    c.option_distribution = option_probs;
    double total = 0;
    for (auto const& [label, p] : option_probs) {
        if (p < 0) throw std::invalid_argument("mc_confidence: negative probability mass");
        total += p;
    }
    if (total > 1.0 + 1e-9) {
        // Ill-formed report (masses exceed one): renormalize rather than carry
        // an out-of-range distribution.
        for (auto& [label, p] : c.option_distribution) p /= total;
    }
    for (auto const& [label, p] : c.option_distribution) c.value = std::max(c.value, p);
    c.degenerate = c.value == 0;
    return c;
}

}  // namespace zoomv
