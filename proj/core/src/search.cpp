#include "zoomv/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "zoomv/assembly.hpp"

namespace zoomv {

std::string_view trace_action_name(TraceAction a) {
    switch (a) {
        case TraceAction::expand: return "expand";
        case TraceAction::dequeue: return "dequeue";
        case TraceAction::update_best: return "update_best";
        case TraceAction::stop: return "stop";
        case TraceAction::prune_too_short: return "prune_too_short";
    }
    return "?";
}

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::epsilon: return "epsilon";
        case Termination::queue_exhausted: return "queue_exhausted";
        case Termination::max_steps: return "max_steps";
    }
    return "?";
}

namespace {

void validate_config(SearchConfig const& config) {
    if (config.epsilon < 0 || config.epsilon > 1) {
        throw std::invalid_argument("search: epsilon must be in [0, 1]");
    }
    if (config.delta <= 0) {
        throw std::invalid_argument("search: delta must be positive");
    }
    if (!(config.split_ratio > 0 && config.split_ratio <= 1)) {
        throw std::invalid_argument("search: split_ratio must be in (0, 1]");
    }
    if (config.max_steps < 1) {
        throw std::invalid_argument("search: max_steps must be >= 1");
    }
    if (config.frames_per_node < 1) {
        throw std::invalid_argument("search: frames_per_node must be >= 1");
    }
}

std::string reflection_text_fallback(ModelBackend& backend, PromptSpec const& prompt) {
    return backend.answer(prompt);
}

// `label` as a standalone word in `text` (no letter or digit on either side).
bool contains_standalone(std::string const& text, std::string const& label) {
    auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
    for (std::size_t at = text.find(label); at != std::string::npos;
         at = text.find(label, at + 1)) {
        bool left_ok = at == 0 || !is_word(static_cast<unsigned char>(text[at - 1]));
        std::size_t end = at + label.size();
        bool right_ok = end >= text.size() || !is_word(static_cast<unsigned char>(text[end]));
        if (left_ok && right_ok) return true;
    }
    return false;
}

}  // namespace

ReflectOutcome spotlight_reflect(SegmentInterval const& segment, SearchQuery const& query,
                                 ModelBackend& backend, SearchConfig const& config,
                                 VideoTimeline const& timeline) {
    if (segment.length() <= 0) {
        throw std::invalid_argument("spotlight_reflect: empty segment");
    }
    int const pad_width = pad_width_for(timeline.duration);
    int const visual_tokens = 0;  // token accounting is not modeled inside the search

    ReflectOutcome out;
    std::vector<FrameRef> node_frames = sample_segment_frames(
        timeline, segment.start, segment.end, config.frames_per_node, visual_tokens);
    LinkedFrameSequence node_seq = link(node_frames, pad_width, SequenceRole::global);

    PromptSpec ground_prompt = build_prompt(PromptTask::ground, {node_seq}, query.text);
    BackendCall ground_call{CallKind::ground, ground_prompt,
                            static_cast<int>(node_frames.size()),
                            static_cast<int>(node_frames.size())};
    out.frames_ground = ground_call.frames_total;
    out.ground_cost_ms = call_cost_ms(ground_call, config.cost_table, config.prefix_cache);

    GroundingResult grounded = backend.ground(ground_prompt, segment);
    out.windows = grounded.windows;
    if (out.windows.empty()) {
        // Nothing parseable: the node is uninformative, skip the reflection.
        out.confidence = Confidence{};
        out.confidence.mode =
            query.open_ended() ? ConfidenceMode::yesno : ConfidenceMode::multiple_choice;
        out.confidence.degenerate = true;
        out.annotation = "empty-parse";
        return out;
    }

    // Reflection sees the grounding frames again (a cacheable prefix) plus a
    // small batch of detail frames from inside the proposal.
    std::vector<LinkedFrameSequence> reflect_seqs{node_seq};
    std::vector<FrameRef> detail = sample_window_frames(
        timeline, out.windows, config.reflect_detail_frames, visual_tokens);
    if (!detail.empty()) {
        reflect_seqs.push_back(link(detail, pad_width, SequenceRole::spotlight));
    }

    PromptTask task = query.open_ended() ? PromptTask::reflect_yesno : PromptTask::reflect_mc;
    PromptExtras extras;
    extras.prior_windows = out.windows;
    extras.options = query.options;
    PromptSpec reflect_prompt = build_prompt(task, std::move(reflect_seqs), query.text,
                                             std::move(extras));

    BackendCall reflect_call{
        task == PromptTask::reflect_mc ? CallKind::reflect_mc : CallKind::reflect_yesno,
        reflect_prompt,
        static_cast<int>(node_frames.size() + detail.size()),
        static_cast<int>(detail.size())};
    out.frames_reflect_total = reflect_call.frames_total;
    out.frames_reflect_uncached = reflect_call.frames_uncached;
    out.reflect_cost_ms = call_cost_ms(reflect_call, config.cost_table, config.prefix_cache);

    try {
        out.confidence = backend.reflect(reflect_prompt, segment);
    } catch (ProtocolDegraded const&) {
        // No token probabilities: estimate from a sampled text answer instead.
        std::string text = reflection_text_fallback(backend, reflect_prompt);
        out.annotation = "degraded-sampling-fallback";
        Confidence c;
        if (query.open_ended()) {
            c.mode = ConfidenceMode::yesno;
            std::size_t yes = text.find("Yes");
            std::size_t no = text.find("No");
            c.value = yes != std::string::npos && (no == std::string::npos || yes < no) ? 1.0 : 0.0;
        } else {
            c.mode = ConfidenceMode::multiple_choice;
            c.value = 0.0;
            for (PromptOption const& o : query.options) {
                if (contains_standalone(text, o.label)) {
                    c.value = 1.0;
                    break;
                }
            }
        }
        out.confidence = c;
    }
    out.confidence.value = std::clamp(out.confidence.value, 0.0, 1.0);
    return out;
}

namespace {

struct QueueEntry {
    SegmentNode node;
};

struct QueueCompare {
    // Max-heap on confidence; equal confidences dequeue in insertion order.
    bool operator()(QueueEntry const& a, QueueEntry const& b) const {
        if (a.node.confidence.value != b.node.confidence.value) {
            return a.node.confidence.value < b.node.confidence.value;
        }
        return a.node.insertion_order > b.node.insertion_order;
    }
};

// The search loop, parameterized over where reflect outcomes come from (live
// backend or recorded trace) so that replay runs the identical control flow.
SearchResult run_search(Seconds duration, SearchConfig const& config,
                        std::function<ReflectOutcome(SegmentInterval const&)> const& reflect_node,
                        SearchTrace header) {
    SearchResult result;
    result.trace = std::move(header);
    result.trace.config = config;
    result.trace.video_duration = duration;

    int steps = 0;
    int insertion = 0;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueCompare> queue;

    auto record = [&](TraceAction action, SegmentInterval const& interval) -> TraceRecord& {
        TraceRecord rec;
        rec.step = steps;
        rec.action = action;
        rec.interval = interval;
        result.trace.records.push_back(std::move(rec));
        return result.trace.records.back();
    };

    auto reflect_and_enqueue = [&](SegmentInterval const& interval) -> SegmentNode {
        ReflectOutcome out = reflect_node(interval);
        ++steps;
        TraceRecord& rec = record(TraceAction::expand, interval);
        rec.step = steps;
        rec.windows = out.windows;
        rec.confidence = out.confidence.value;
        rec.ground_cost_ms = out.ground_cost_ms;
        rec.reflect_cost_ms = out.reflect_cost_ms;
        rec.frames_ground = out.frames_ground;
        rec.frames_reflect_total = out.frames_reflect_total;
        rec.frames_reflect_uncached = out.frames_reflect_uncached;
        rec.annotation = out.annotation;
        result.modeled_cost_ms += out.ground_cost_ms + out.reflect_cost_ms;

        SegmentNode node{interval, std::move(out.windows), std::move(out.confidence),
                         insertion++};
        queue.push(QueueEntry{node});
        return node;
    };

    // The root proposal seeds the running best before the loop.
    SegmentInterval root{0, duration, 0, {}};
    SegmentNode root_node = reflect_and_enqueue(root);
    result.best_windows = root_node.windows;
    result.best_confidence = root_node.confidence.value;

    result.terminated_by = Termination::queue_exhausted;
    bool done = false;
    while (!queue.empty() && !done) {
        SegmentNode node = queue.top().node;
        queue.pop();
        {
            TraceRecord& rec = record(TraceAction::dequeue, node.interval);
            rec.windows = node.windows;
            rec.confidence = node.confidence.value;
        }
        if (node.confidence.value >= result.best_confidence) {
            result.best_windows = node.windows;
            result.best_confidence = node.confidence.value;
            TraceRecord& rec = record(TraceAction::update_best, node.interval);
            rec.windows = node.windows;
            rec.confidence = node.confidence.value;
        }
        if (node.confidence.value >= config.epsilon) {
            TraceRecord& rec = record(TraceAction::stop, node.interval);
            rec.confidence = node.confidence.value;
            result.terminated_by = Termination::epsilon;
            break;
        }

        ++result.nodes_expanded;
        for (SegmentInterval const& child : split_segment(node.interval, config.split_ratio)) {
            if (child.length() < config.delta - kTimeEps) {
                record(TraceAction::prune_too_short, child);
                continue;
            }
            if (steps >= config.max_steps) {
                result.terminated_by = Termination::max_steps;
                done = true;
                break;
            }
            (void)reflect_and_enqueue(child);
        }
        if (done) {
            // Keep best == max over every reflected node: the queue top is the
            // only candidate that can still exceed it.
            if (!queue.empty() && queue.top().node.confidence.value >= result.best_confidence) {
                SegmentNode const& top = queue.top().node;
                result.best_windows = top.windows;
                result.best_confidence = top.confidence.value;
                TraceRecord& rec = record(TraceAction::update_best, top.interval);
                rec.windows = top.windows;
                rec.confidence = top.confidence.value;
                rec.annotation = "max-steps-final";
            }
        }
    }

    result.steps = steps;
    result.trace.complete = true;
    return result;
}

}  // namespace

SearchResult hierarchical_search(VideoTimeline const& timeline, SearchQuery const& query,
                                 ModelBackend& backend, SearchConfig const& config) {
    validate_config(config);
    if (timeline.duration <= 0) {
        throw std::invalid_argument("hierarchical_search: duration must be positive");
    }
    if (timeline.frame_times.empty()) {
        throw std::invalid_argument("hierarchical_search: timeline has no frames");
    }

    SearchTrace header;
    header.frame_count = timeline.frame_times.size();
    header.query = query.text;

    auto reflect_node = [&](SegmentInterval const& segment) {
        return spotlight_reflect(segment, query, backend, config, timeline);
    };
    return run_search(timeline.duration, config, reflect_node, std::move(header));
}

SearchResult replay(SearchTrace const& trace) {
    if (!trace.complete) {
        throw std::invalid_argument("replay: trace is incomplete (no result footer)");
    }
    std::map<std::pair<Seconds, Seconds>, ReflectOutcome> outcomes;
    for (TraceRecord const& rec : trace.records) {
        if (rec.action != TraceAction::expand) continue;
        ReflectOutcome out;
        out.windows = rec.windows;
        out.confidence.value = rec.confidence;
        out.ground_cost_ms = rec.ground_cost_ms;
        out.reflect_cost_ms = rec.reflect_cost_ms;
        out.frames_ground = rec.frames_ground;
        out.frames_reflect_total = rec.frames_reflect_total;
        out.frames_reflect_uncached = rec.frames_reflect_uncached;
        out.annotation = rec.annotation;
        outcomes[{rec.interval.start, rec.interval.end}] = std::move(out);
    }

    SearchTrace header;
    header.frame_count = trace.frame_count;
    header.query = trace.query;

    auto reflect_node = [&](SegmentInterval const& segment) -> ReflectOutcome {
        auto it = outcomes.find({segment.start, segment.end});
        if (it == outcomes.end()) {
            throw std::invalid_argument("replay: trace truncated, node missing");
        }
        return it->second;
    };
    return run_search(trace.video_duration, trace.config, reflect_node, std::move(header));
}

namespace {

nlohmann::json windows_to_json(WindowSet const& ws) {
    nlohmann::json arr = nlohmann::json::array();
    for (TemporalWindow const& w : ws.windows) {
        arr.push_back(nlohmann::json::array({w.start, w.end}));
    }
    return arr;
}

WindowSet windows_from_json(nlohmann::json const& arr) {
    WindowSet ws;
    for (auto const& pair : arr) {
        ws.windows.push_back(TemporalWindow{pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
    return ws;
}

Branch branch_from_name(std::string const& name) {
    if (name == "begin") return Branch::begin;
    if (name == "mid") return Branch::mid;
    if (name == "end") return Branch::end;
    throw std::invalid_argument("unknown branch label: " + name);
}

TraceAction action_from_name(std::string const& name) {
    if (name == "expand") return TraceAction::expand;
    if (name == "dequeue") return TraceAction::dequeue;
    if (name == "update_best") return TraceAction::update_best;
    if (name == "stop") return TraceAction::stop;
    if (name == "prune_too_short") return TraceAction::prune_too_short;
    throw std::invalid_argument("unknown trace action: " + name);
}

nlohmann::json interval_to_json(SegmentInterval const& seg) {
    nlohmann::json lineage = nlohmann::json::array();
    for (Branch b : seg.lineage) lineage.push_back(std::string(branch_name(b)));
    return nlohmann::json{{"start", seg.start},
                          {"end", seg.end},
                          {"depth", seg.depth},
                          {"lineage", std::move(lineage)}};
}

SegmentInterval interval_from_json(nlohmann::json const& j) {
    SegmentInterval seg;
    seg.start = j.at("start").get<double>();
    seg.end = j.at("end").get<double>();
    seg.depth = j.at("depth").get<int>();
    for (auto const& b : j.at("lineage")) {
        seg.lineage.push_back(branch_from_name(b.get<std::string>()));
    }
    return seg;
}

}  // namespace

void write_trace(SearchResult const& result, std::ostream& out) {
    SearchTrace const& trace = result.trace;
    nlohmann::json header{{"type", "header"},
                          {"version", 1},
                          {"duration", trace.video_duration},
                          {"frame_count", trace.frame_count},
                          {"query", trace.query},
                          {"config",
                           {{"epsilon", trace.config.epsilon},
                            {"delta", trace.config.delta},
                            {"split_ratio", trace.config.split_ratio},
                            {"frames_per_node", trace.config.frames_per_node},
                            {"reflect_detail_frames", trace.config.reflect_detail_frames},
                            {"max_steps", trace.config.max_steps},
                            {"prefix_cache", trace.config.prefix_cache}}}};
    out << header.dump() << "\n";

    for (TraceRecord const& rec : trace.records) {
        nlohmann::json j{{"type", "record"},
                         {"step", rec.step},
                         {"action", std::string(trace_action_name(rec.action))},
                         {"interval", interval_to_json(rec.interval)},
                         {"windows", windows_to_json(rec.windows)},
                         {"confidence", rec.confidence},
                         {"ground_cost_ms", rec.ground_cost_ms},
                         {"reflect_cost_ms", rec.reflect_cost_ms},
                         {"frames_ground", rec.frames_ground},
                         {"frames_reflect_total", rec.frames_reflect_total},
                         {"frames_reflect_uncached", rec.frames_reflect_uncached}};
        if (!rec.annotation.empty()) j["annotation"] = rec.annotation;
        out << j.dump() << "\n";
    }

    nlohmann::json footer{{"type", "result"},
                          {"best_windows", windows_to_json(result.best_windows)},
                          {"best_confidence", result.best_confidence},
                          {"steps", result.steps},
                          {"nodes_expanded", result.nodes_expanded},
                          {"terminated_by", std::string(termination_name(result.terminated_by))},
                          {"modeled_cost_ms", result.modeled_cost_ms}};
    out << footer.dump() << "\n";
}

SearchTrace read_trace(std::istream& in) {
    SearchTrace trace;
    bool have_header = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (nlohmann::json::exception const& e) {
            throw std::invalid_argument(std::string("trace: invalid JSONL line: ") + e.what());
        }
        std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            have_header = true;
            trace.video_duration = j.at("duration").get<double>();
            trace.frame_count = j.at("frame_count").get<std::size_t>();
            trace.query = j.at("query").get<std::string>();
            nlohmann::json const& c = j.at("config");
            trace.config.epsilon = c.at("epsilon").get<double>();
            trace.config.delta = c.at("delta").get<double>();
            trace.config.split_ratio = c.at("split_ratio").get<double>();
            trace.config.frames_per_node = c.at("frames_per_node").get<int>();
            trace.config.reflect_detail_frames = c.at("reflect_detail_frames").get<int>();
            trace.config.max_steps = c.at("max_steps").get<int>();
            trace.config.prefix_cache = c.at("prefix_cache").get<bool>();
        } else if (type == "record") {
            TraceRecord rec;
            rec.step = j.at("step").get<int>();
            rec.action = action_from_name(j.at("action").get<std::string>());
            rec.interval = interval_from_json(j.at("interval"));
            rec.windows = windows_from_json(j.at("windows"));
            rec.confidence = j.at("confidence").get<double>();
            rec.ground_cost_ms = j.at("ground_cost_ms").get<double>();
            rec.reflect_cost_ms = j.at("reflect_cost_ms").get<double>();
            rec.frames_ground = j.at("frames_ground").get<int>();
            rec.frames_reflect_total = j.at("frames_reflect_total").get<int>();
            rec.frames_reflect_uncached = j.at("frames_reflect_uncached").get<int>();
            if (j.contains("annotation")) rec.annotation = j.at("annotation").get<std::string>();
            trace.records.push_back(std::move(rec));
        } else if (type == "result") {
            trace.complete = true;
        } else {
            throw std::invalid_argument("trace: unknown record type: " + type);
        }
    }
    if (!have_header) {
        throw std::invalid_argument("trace: missing header record");
    }
    return trace;
}

}  // namespace zoomv
