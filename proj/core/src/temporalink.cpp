#include "zoomv/temporalink.hpp"

#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace zoomv {

long long LinkedFrameSequence::token_count() const {
    long long total = 0;
    for (LinkedEntry const& e : entries) {
        total += e.frame.visual_token_count + pad_width;
    }
    return total;
}

LinkedFrameSequence link(std::vector<FrameRef> const& frames, int pad_width, SequenceRole role) {
    if (frames.empty()) {
        throw std::invalid_argument("link: frame list is empty");
    }
    LinkedFrameSequence seq;
    seq.pad_width = pad_width;
    seq.role = role;
    seq.entries.reserve(frames.size());
    Seconds prev = frames.front().time;
    for (FrameRef const& f : frames) {
        if (f.time < prev - kTimeEps) {
            throw std::invalid_argument("link: frames must be sorted by time");
        }
        prev = f.time;
        seq.entries.push_back(LinkedEntry{f, quantize(f.time, pad_width)});
    }
    return seq;
}

namespace {

std::string render_options(std::vector<PromptOption> const& options) {
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i) out += "\n";
        out += options[i].label;
        out += ". ";
        out += options[i].text;
    }
    return out;
}

void check_sequence_order(std::vector<LinkedFrameSequence> const& sequences) {
    bool seen_spotlight = false;
    for (LinkedFrameSequence const& s : sequences) {
        if (s.role == SequenceRole::spotlight) {
            seen_spotlight = true;
        } else if (seen_spotlight) {
            throw std::invalid_argument("build_prompt: global sequence after spotlight");
        }
    }
}

}  // namespace

PromptSpec build_prompt(PromptTask task, std::vector<LinkedFrameSequence> sequences,
                        std::string query, PromptExtras extras) {
    check_sequence_order(sequences);

    PromptSpec spec;
    spec.task = task;
    spec.sequences = std::move(sequences);
    spec.query = std::move(query);

    switch (task) {
        case PromptTask::ground:
            spec.instruction = kGroundInstruction;
            break;
        case PromptTask::reflect_yesno:
            if (!extras.prior_windows) {
                throw std::invalid_argument("build_prompt: reflect_yesno needs prior_windows");
            }
            spec.prior_windows = std::move(extras.prior_windows);
            spec.instruction = kReflectYesNoInstruction;
            break;
        case PromptTask::reflect_mc:
            if (!extras.prior_windows) {
                throw std::invalid_argument("build_prompt: reflect_mc needs prior_windows");
            }
            if (extras.options.empty()) {
                throw std::invalid_argument("build_prompt: reflect_mc needs options");
            }
            spec.prior_windows = std::move(extras.prior_windows);
            spec.options = std::move(extras.options);
            spec.instruction = kReflectMcInstruction;
            break;
        case PromptTask::answer:
            spec.options = std::move(extras.options);
            spec.instruction = kAnswerInstruction;
            break;
        case PromptTask::spotlight_answer:
            if (!extras.clip_windows) {
                throw std::invalid_argument("build_prompt: spotlight_answer needs clip windows");
            }
            spec.prior_windows = extras.clip_windows;
            spec.options = std::move(extras.options);
            spec.instruction = "Please watch the clip of " +
                               format_windows(*extras.clip_windows) +
                               " and answer the question.";
            break;
    }
    return spec;
}

std::vector<std::string> prompt_text_segments(PromptSpec const& spec) {
    std::vector<std::string> segments;
    if (!spec.query.empty()) {
        segments.push_back(spec.query);
    }
    if (spec.prior_windows &&
        (spec.task == PromptTask::reflect_yesno || spec.task == PromptTask::reflect_mc)) {
        segments.push_back("Proposed time range: " + format_windows(*spec.prior_windows) + ".");
    }
    if (!spec.options.empty()) {
        segments.push_back(render_options(spec.options));
    }
    segments.push_back(spec.instruction);
    return segments;
}

TokenBudget token_budget(PromptSpec const& spec) {
    TokenBudget budget;
    for (LinkedFrameSequence const& seq : spec.sequences) {
        for (LinkedEntry const& e : seq.entries) {
            budget.visual_tokens += e.frame.visual_token_count;
            budget.timestamp_tokens += seq.pad_width;
            ++budget.total_frames;
        }
    }
    long long chars = 0;
    for (std::string const& s : prompt_text_segments(spec)) {
        chars += static_cast<long long>(s.size());
    }
    budget.text_tokens_estimate = (chars + 3) / 4;  // ~4 chars per token
    return budget;
}

std::string serialize_prompt(PromptSpec const& spec) {
    nlohmann::json content = nlohmann::json::array();
    for (LinkedFrameSequence const& seq : spec.sequences) {
        for (LinkedEntry const& e : seq.entries) {
            nlohmann::json item{{"type", "frame"},
                                {"time", e.frame.time},
                                {"stamp", e.stamp.text}};
            if (!e.frame.content_ref.empty()) {
                item["ref"] = e.frame.content_ref;
            }
            content.push_back(std::move(item));
        }
    }
    for (std::string const& s : prompt_text_segments(spec)) {
        content.push_back(nlohmann::json{{"type", "text"}, {"text", s}});
    }
    nlohmann::json doc{{"messages", nlohmann::json::array({nlohmann::json{
                           {"role", "user"}, {"content", std::move(content)}}})}};
    return doc.dump();
}

}  // namespace zoomv
