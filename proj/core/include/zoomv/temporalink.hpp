#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zoomv/temporal.hpp"

namespace zoomv {

// Reference to one sampled frame. The frame's pixels never enter this layer;
// `content_ref` is an opaque handle (URI or inline payload id) the caller's
// ingestion layer understands, empty for simulated backends.
struct FrameRef {
    Seconds time{0};
    std::size_t timeline_index{0};
    int visual_token_count{0};  // N, constant across all frames of one request
    std::string content_ref;
};

enum class SequenceRole { global, spotlight };

struct LinkedEntry {
    FrameRef frame;
    QuantizedTimestamp stamp;
};

// The TemporaLink layout: each frame paired with its padded timestamp text.
// A sequence of T entries costs T * (N + P) tokens.
struct LinkedFrameSequence {
    std::vector<LinkedEntry> entries;
    int pad_width{0};
    SequenceRole role{SequenceRole::global};

    long long token_count() const;
};

// Pair every frame with quantize(frame.time, pad_width), order preserved.
// frames must be non-empty and sorted by time.
LinkedFrameSequence link(std::vector<FrameRef> const& frames, int pad_width,
                         SequenceRole role = SequenceRole::global);

enum class PromptTask { ground, reflect_yesno, reflect_mc, answer, spotlight_answer };

struct PromptOption {
    std::string label;
    std::string text;
    bool operator==(PromptOption const&) const = default;
};

// Registered instruction templates.
inline constexpr std::string_view kGroundInstruction = "Find the relevant windows";
inline constexpr std::string_view kReflectYesNoInstruction =
    "Are the proposed relevant windows correct?";
inline constexpr std::string_view kReflectMcInstruction = "Answer the options directly";
inline constexpr std::string_view kAnswerInstruction =
    "Answer the following questions related to this video";

// One inference request: frame sequences (global strictly before spotlight),
// the query, a filled instruction template, and per-task extras.
struct PromptSpec {
    PromptTask task{PromptTask::ground};
    std::vector<LinkedFrameSequence> sequences;
    std::string query;
    std::string instruction;
    std::vector<PromptOption> options;        // multiple-choice turns
    std::optional<WindowSet> prior_windows;   // reflection / spotlight-answer turns
};

struct PromptExtras {
    std::optional<WindowSet> prior_windows;   // required for reflect_*
    std::vector<PromptOption> options;        // required for reflect_mc
    std::optional<WindowSet> clip_windows;    // required for spotlight_answer
};

// Select and fill the instruction template for `task` and validate that the
// extras the task needs are present. Throws std::invalid_argument otherwise.
PromptSpec build_prompt(PromptTask task, std::vector<LinkedFrameSequence> sequences,
                        std::string query, PromptExtras extras = {});

struct TokenBudget {
    long long visual_tokens{0};
    long long timestamp_tokens{0};
    long long text_tokens_estimate{0};
    long long total_frames{0};
};

TokenBudget token_budget(PromptSpec const& spec);

// Flat text rendering of the prompt's non-frame part, in serialization order:
// query, task extras, instruction. The same segments, in the same order,
// appear as text items on the wire.
std::vector<std::string> prompt_text_segments(PromptSpec const& spec);

// Canonical structured-message document for this prompt (see docs/protocol.md).
// Byte-deterministic: golden files pin the exact encoding.
std::string serialize_prompt(PromptSpec const& spec);

}  // namespace zoomv
