#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zoomv/assembly.hpp"
#include "zoomv/backend.hpp"
#include "zoomv/search.hpp"

namespace zoomv {

struct CorpusIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyCorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroundingSample {
    std::string video_id;
    Seconds duration{0};
    std::string query;
    WindowSet ground_truth;
};

struct QASample {
    std::string video_id;
    Seconds duration{0};
    std::string question;
    std::vector<PromptOption> options;
    std::string answer_label;
    std::optional<TemporalWindow> ground_truth;  // temporal question grounding
};

// Which window stands for a multi-window prediction in Recall@1.
enum class TopOneRule { longest_window, first_window };

std::optional<TemporalWindow> top_one_window(WindowSet const& prediction, TopOneRule rule);

// Top-1 IoU of a prediction against its best-matching truth window; empty
// predictions score 0.
double sample_iou(WindowSet const& prediction, WindowSet const& truth, TopOneRule rule);

struct ScoredPrediction {
    WindowSet predicted;
    WindowSet truth;
};

// Fraction of samples whose top-1 IoU reaches each threshold.
std::map<double, double> recall_at(std::vector<ScoredPrediction> const& predictions,
                                   std::vector<double> const& thresholds,
                                   TopOneRule rule = TopOneRule::longest_window);

// Mean top-1 IoU. Throws std::invalid_argument on zero samples.
double mean_iou(std::vector<ScoredPrediction> const& predictions,
                TopOneRule rule = TopOneRule::longest_window);

// First standalone capital letter in the answer text that matches an option
// label ("The answer is B." -> "B"). Empty when nothing matches.
std::optional<std::string> extract_answer_label(std::string const& text,
                                                std::vector<PromptOption> const& options);

// Exact-label match rate over aligned lists. Throws std::invalid_argument on
// length mismatch.
double vqa_accuracy(std::vector<std::string> const& predicted,
                    std::vector<std::string> const& expected);

struct CalibrationBin {
    double lo{0};
    double hi{0};
    std::size_t count{0};
    double mean_confidence{0};
    double mean_outcome{0};
};

struct CalibrationReport {
    std::vector<CalibrationBin> bins;
    std::size_t total{0};
};

// Equal-width bins over [0,1], right-closed except the first. Outcomes may be
// 0/1 correctness or IoU values. Bin counts always sum to the input size.
CalibrationReport calibration_bins(std::vector<std::pair<double, double>> const& pairs,
                                   int n_bins);

enum class CorpusFormat { charades_sta, activitynet_captions, generic_jsonl };

struct GroundingCorpus {
    std::vector<GroundingSample> samples;
    int skipped_lines{0};  // malformed entries, reported not fatal
};

// Load annotations. charades_sta: lines "video start end##sentence";
// activitynet_captions: JSON map video -> {duration, timestamps, sentences};
// generic_jsonl: one {"video","duration","query","windows"} object per line.
// Throws CorpusIoError when unreadable, EmptyCorpusError when nothing parses.
GroundingCorpus load_grounding_corpus(std::string const& path, CorpusFormat format);

// generic_jsonl serialization; load_grounding_corpus(generic_jsonl) inverts it.
std::string to_generic_jsonl(std::vector<GroundingSample> const& samples);

struct QACorpus {
    std::vector<QASample> samples;
    int skipped_lines{0};
};

// JSONL, one {"video","duration","question","options","answer"[,"window"]} per
// line; options as [{"label","text"}].
QACorpus load_qa_corpus(std::string const& path);

struct SampleRecord {
    std::string id;
    double iou{0};
    int steps{0};
    double cost_ms{0};
    bool correct{false};
    double confidence{0};
    std::string error;  // per-sample backend failure, sample scored as miss
};

struct MetricsReport {
    std::map<double, double> recall;
    double mean_iou_value{0};
    double vqa_accuracy_value{0};
    std::size_t sample_count{0};
    double mean_steps{0};
    double mean_cost_ms{0};
    std::vector<SampleRecord> per_sample;
};

struct BenchmarkOptions {
    SearchConfig search;
    AssemblyConfig assembly;
    double frame_interval{1.0};  // synthesized timeline granularity, seconds
    int jobs{1};
    TopOneRule top_one{TopOneRule::longest_window};
    std::string trace_dir;  // when set, one trace JSONL per sample
};

using GroundingBackendFactory =
    std::function<std::shared_ptr<ModelBackend>(std::size_t index, GroundingSample const&)>;
using QABackendFactory =
    std::function<std::shared_ptr<ModelBackend>(std::size_t index, QASample const&)>;

// Drive the search over every sample and aggregate grounding metrics. Samples
// may run concurrently (options.jobs); records merge by sample index so the
// report does not depend on completion order. Backend failures score the
// sample as a miss and the run continues.
MetricsReport run_benchmark(std::vector<GroundingSample> const& corpus,
                            GroundingBackendFactory const& factory,
                            BenchmarkOptions const& options);

// Same, plus an answer call over the assembled input and VQA accuracy.
MetricsReport run_qa_benchmark(std::vector<QASample> const& corpus,
                               QABackendFactory const& factory,
                               BenchmarkOptions const& options);

// Pinned output schemas (see docs/protocol.md).
std::string metrics_csv(MetricsReport const& report);
std::string calibration_csv(CalibrationReport const& report);

}  // namespace zoomv
