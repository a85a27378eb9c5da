#include "zoomv/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "zoomv/oracle_backend.hpp"
#include "zoomv/rng.hpp"

namespace zoomv {

std::optional<TemporalWindow> top_one_window(WindowSet const& prediction, TopOneRule rule) {
    if (prediction.empty()) return std::nullopt;
    if (rule == TopOneRule::first_window) return prediction.windows.front();
    auto it = std::max_element(prediction.windows.begin(), prediction.windows.end(),
                               [](TemporalWindow const& a, TemporalWindow const& b) {
                                   return a.length() < b.length();
                               });
    return *it;
}

double sample_iou(WindowSet const& prediction, WindowSet const& truth, TopOneRule rule) {
    std::optional<TemporalWindow> top = top_one_window(prediction, rule);
    if (!top) return 0.0;
    double best = 0.0;
    for (TemporalWindow const& t : truth.windows) {
        best = std::max(best, iou(*top, t));
    }
    return best;
}

std::map<double, double> recall_at(std::vector<ScoredPrediction> const& predictions,
                                   std::vector<double> const& thresholds, TopOneRule rule) {
    std::map<double, double> rates;
    if (predictions.empty()) {
        throw std::invalid_argument("recall_at: no predictions");
    }
    for (double tau : thresholds) rates[tau] = 0.0;
    for (ScoredPrediction const& p : predictions) {
        double q = sample_iou(p.predicted, p.truth, rule);
        for (double tau : thresholds) {
            if (q >= tau) rates[tau] += 1.0;
        }
    }
    for (auto& [tau, hits] : rates) hits /= static_cast<double>(predictions.size());
    return rates;
}

double mean_iou(std::vector<ScoredPrediction> const& predictions, TopOneRule rule) {
    if (predictions.empty()) {
        throw std::invalid_argument("mean_iou: no predictions");
    }
    double total = 0;
    for (ScoredPrediction const& p : predictions) {
        total += sample_iou(p.predicted, p.truth, rule);
    }
    return total / static_cast<double>(predictions.size());
}

std::optional<std::string> extract_answer_label(std::string const& text,
                                                std::vector<PromptOption> const& options) {
    auto is_word = [](unsigned char c) { return std::isalnum(c) != 0; };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] < 'A' || text[i] > 'Z') continue;
        if (i > 0 && is_word(static_cast<unsigned char>(text[i - 1]))) continue;
        if (i + 1 < text.size() && is_word(static_cast<unsigned char>(text[i + 1]))) continue;
        std::string letter(1, text[i]);
        for (PromptOption const& o : options) {
            if (o.label == letter) return letter;
        }
    }
    return std::nullopt;
}

double vqa_accuracy(std::vector<std::string> const& predicted,
                    std::vector<std::string> const& expected) {
    if (predicted.size() != expected.size()) {
        throw std::invalid_argument("vqa_accuracy: prediction/answer length mismatch");
    }
    if (predicted.empty()) {
        throw std::invalid_argument("vqa_accuracy: no samples");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == expected[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

CalibrationReport calibration_bins(std::vector<std::pair<double, double>> const& pairs,
                                   int n_bins) {
    if (n_bins < 1) {
        throw std::invalid_argument("calibration_bins: n_bins must be >= 1");
    }
    CalibrationReport report;
    report.total = pairs.size();
    double width = 1.0 / n_bins;
    report.bins.resize(static_cast<std::size_t>(n_bins));
    for (int i = 0; i < n_bins; ++i) {
        report.bins[static_cast<std::size_t>(i)].lo = i * width;
        report.bins[static_cast<std::size_t>(i)].hi = i + 1 == n_bins ? 1.0 : (i + 1) * width;
    }
    for (auto const& [confidence, outcome] : pairs) {
        // Right-closed bins except the first: (k*w, (k+1)*w], bin 0 is [0, w].
        int idx = confidence <= 0 ? 0
                                  : static_cast<int>(std::ceil(confidence * n_bins - 1e-12)) - 1;
        idx = std::clamp(idx, 0, n_bins - 1);
        CalibrationBin& bin = report.bins[static_cast<std::size_t>(idx)];
        ++bin.count;
        bin.mean_confidence += confidence;
        bin.mean_outcome += outcome;
    }
    for (CalibrationBin& bin : report.bins) {
        if (bin.count > 0) {
            bin.mean_confidence /= static_cast<double>(bin.count);
            bin.mean_outcome /= static_cast<double>(bin.count);
        }
    }
    return report;
}

namespace {

std::string read_file_or_throw(std::string const& path, std::ifstream& in) {
    in.open(path);
    if (!in) {
        throw CorpusIoError("cannot open corpus file: " + path);
    }
    return path;
}

GroundingCorpus load_charades(std::ifstream& in) {
    GroundingCorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t sep = line.find("##");
        if (sep == std::string::npos) {
            ++corpus.skipped_lines;
            continue;
        }
        std::istringstream head(line.substr(0, sep));
        GroundingSample sample;
        double start = 0, end = 0;
        if (!(head >> sample.video_id >> start >> end) || start > end) {
            ++corpus.skipped_lines;
            continue;
        }
        sample.query = line.substr(sep + 2);
        sample.ground_truth.windows.push_back(TemporalWindow{start, end});
        sample.ground_truth.normalized = true;
        // The annotation line carries no duration; the window extent is the
        // best lower bound available to desk-scale runs.
        sample.duration = end;
        corpus.samples.push_back(std::move(sample));
    }
    return corpus;
}

GroundingCorpus load_activitynet(std::ifstream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (nlohmann::json::exception const& e) {
        throw CorpusIoError(std::string("activitynet corpus is not valid JSON: ") + e.what());
    }
    GroundingCorpus corpus;
    for (auto const& [video_id, entry] : doc.items()) {
        if (!entry.is_object() || !entry.contains("duration") || !entry.contains("timestamps") ||
            !entry.contains("sentences")) {
            ++corpus.skipped_lines;
            continue;
        }
        double duration = entry["duration"].get<double>();
        auto const& stamps = entry["timestamps"];
        auto const& sentences = entry["sentences"];
        std::size_t n = std::min(stamps.size(), sentences.size());
        if (stamps.size() != sentences.size()) ++corpus.skipped_lines;
        for (std::size_t i = 0; i < n; ++i) {
            GroundingSample sample;
            sample.video_id = video_id;
            sample.duration = duration;
            sample.query = sentences[i].get<std::string>();
            double s = stamps[i].at(0).get<double>();
            double e = stamps[i].at(1).get<double>();
            if (s > e) {
                ++corpus.skipped_lines;
                continue;
            }
            sample.ground_truth.windows.push_back(
                TemporalWindow{std::max(0.0, s), std::min(duration, e)});
            sample.ground_truth.normalized = true;
            corpus.samples.push_back(std::move(sample));
        }
    }
    return corpus;
}

GroundingCorpus load_generic_jsonl(std::ifstream& in) {
    GroundingCorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            GroundingSample sample;
            sample.video_id = j.at("video").get<std::string>();
            sample.duration = j.at("duration").get<double>();
            sample.query = j.at("query").get<std::string>();
            for (auto const& pair : j.at("windows")) {
                sample.ground_truth.windows.push_back(
                    TemporalWindow{pair.at(0).get<double>(), pair.at(1).get<double>()});
            }
            sample.ground_truth = merge(sample.ground_truth);
            corpus.samples.push_back(std::move(sample));
        } catch (nlohmann::json::exception const&) {
            ++corpus.skipped_lines;
        }
    }
    return corpus;
}

}  // namespace

GroundingCorpus load_grounding_corpus(std::string const& path, CorpusFormat format) {
    std::ifstream in;
    read_file_or_throw(path, in);
    GroundingCorpus corpus;
    switch (format) {
        case CorpusFormat::charades_sta: corpus = load_charades(in); break;
        case CorpusFormat::activitynet_captions: corpus = load_activitynet(in); break;
        case CorpusFormat::generic_jsonl: corpus = load_generic_jsonl(in); break;
    }
    if (corpus.samples.empty()) {
        throw EmptyCorpusError("no samples parsed from " + path);
    }
    return corpus;
}

std::string to_generic_jsonl(std::vector<GroundingSample> const& samples) {
    std::string out;
    for (GroundingSample const& s : samples) {
        nlohmann::json windows = nlohmann::json::array();
        for (TemporalWindow const& w : s.ground_truth.windows) {
            windows.push_back(nlohmann::json::array({w.start, w.end}));
        }
        nlohmann::json j{{"video", s.video_id},
                         {"duration", s.duration},
                         {"query", s.query},
                         {"windows", std::move(windows)}};
        out += j.dump();
        out += "\n";
    }
    return out;
}

QACorpus load_qa_corpus(std::string const& path) {
    std::ifstream in;
    read_file_or_throw(path, in);
    QACorpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            QASample sample;
            sample.video_id = j.at("video").get<std::string>();
            sample.duration = j.at("duration").get<double>();
            sample.question = j.at("question").get<std::string>();
            for (auto const& o : j.at("options")) {
                sample.options.push_back(PromptOption{o.at("label").get<std::string>(),
                                                      o.at("text").get<std::string>()});
            }
            sample.answer_label = j.at("answer").get<std::string>();
            bool valid = false;
            for (PromptOption const& o : sample.options) {
                valid = valid || o.label == sample.answer_label;
            }
            if (!valid) {
                ++corpus.skipped_lines;
                continue;
            }
            if (j.contains("window")) {
                sample.ground_truth = TemporalWindow{j["window"].at(0).get<double>(),
                                                     j["window"].at(1).get<double>()};
            }
            corpus.samples.push_back(std::move(sample));
        } catch (nlohmann::json::exception const&) {
            ++corpus.skipped_lines;
        }
    }
    if (corpus.samples.empty()) {
        throw EmptyCorpusError("no samples parsed from " + path);
    }
    return corpus;
}

namespace {

// Deterministic fan-out: records land in their sample's slot regardless of
// which worker finishes first.
void for_each_sample(std::size_t count, int jobs, std::function<void(std::size_t)> const& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

void maybe_write_trace(BenchmarkOptions const& options, std::string const& id, std::size_t index,
                       SearchResult const& result) {
    if (options.trace_dir.empty()) return;
    std::ofstream out(options.trace_dir + "/" + id + "_" + std::to_string(index) + ".jsonl");
    if (out) write_trace(result, out);
}

void finalize_means(MetricsReport& report) {
    if (report.sample_count == 0) return;
    double steps = 0, cost = 0;
    for (SampleRecord const& r : report.per_sample) {
        steps += r.steps;
        cost += r.cost_ms;
    }
    report.mean_steps = steps / static_cast<double>(report.sample_count);
    report.mean_cost_ms = cost / static_cast<double>(report.sample_count);
}

}  // namespace

MetricsReport run_benchmark(std::vector<GroundingSample> const& corpus,
                            GroundingBackendFactory const& factory,
                            BenchmarkOptions const& options) {
    MetricsReport report;
    report.sample_count = corpus.size();
    report.per_sample.resize(corpus.size());
    std::vector<ScoredPrediction> predictions(corpus.size());

    for_each_sample(corpus.size(), options.jobs, [&](std::size_t i) {
        GroundingSample const& sample = corpus[i];
        SampleRecord& rec = report.per_sample[i];
        rec.id = sample.video_id;
        predictions[i].truth = sample.ground_truth;
        try {
            std::shared_ptr<ModelBackend> backend = factory(i, sample);
            VideoTimeline timeline = make_timeline(sample.duration, options.frame_interval);
            SearchResult result = hierarchical_search(timeline, SearchQuery{sample.query, {}},
                                                      *backend, options.search);
            AssembledInput input =
                assemble(timeline, result.best_windows, options.assembly,
                         pad_width_for(timeline.duration));
            (void)input;
            predictions[i].predicted = result.best_windows;
            rec.iou = sample_iou(result.best_windows, sample.ground_truth, options.top_one);
            rec.steps = result.steps;
            rec.cost_ms = result.modeled_cost_ms;
            rec.confidence = result.best_confidence;
            rec.correct = rec.iou >= 0.5;
            maybe_write_trace(options, sample.video_id, i, result);
        } catch (std::exception const& e) {
            rec.error = e.what();  // scored as a miss, run continues
        }
    });

    report.recall = recall_at(predictions, {0.3, 0.5, 0.7}, options.top_one);
    report.mean_iou_value = mean_iou(predictions, options.top_one);
    finalize_means(report);
    return report;
}

MetricsReport run_qa_benchmark(std::vector<QASample> const& corpus,
                               QABackendFactory const& factory,
                               BenchmarkOptions const& options) {
    MetricsReport report;
    report.sample_count = corpus.size();
    report.per_sample.resize(corpus.size());
    std::vector<ScoredPrediction> predictions(corpus.size());
    std::vector<std::string> predicted_labels(corpus.size());
    std::vector<std::string> expected_labels(corpus.size());

    for_each_sample(corpus.size(), options.jobs, [&](std::size_t i) {
        QASample const& sample = corpus[i];
        SampleRecord& rec = report.per_sample[i];
        rec.id = sample.video_id;
        expected_labels[i] = sample.answer_label;
        if (sample.ground_truth) {
            predictions[i].truth.windows.push_back(*sample.ground_truth);
            predictions[i].truth.normalized = true;
        }
        try {
            std::shared_ptr<ModelBackend> backend = factory(i, sample);
            VideoTimeline timeline = make_timeline(sample.duration, options.frame_interval);
            SearchQuery query{sample.question, sample.options};
            SearchResult result =
                hierarchical_search(timeline, query, *backend, options.search);
            int pad = pad_width_for(timeline.duration);
            AssembledInput input =
                assemble(timeline, result.best_windows, options.assembly, pad);

            PromptSpec prompt;
            if (!input.source_windows.empty()) {
                std::vector<LinkedFrameSequence> seqs{input.global};
                if (!input.spotlight.entries.empty()) seqs.push_back(input.spotlight);
                PromptExtras extras;
                extras.clip_windows = input.source_windows;
                extras.options = sample.options;
                prompt = build_prompt(PromptTask::spotlight_answer, std::move(seqs),
                                      sample.question, std::move(extras));
            } else {
                PromptExtras extras;
                extras.options = sample.options;
                prompt = build_prompt(PromptTask::answer, {input.global}, sample.question,
                                      std::move(extras));
            }
            int frames = static_cast<int>(input.total_frames());
            BackendCall answer_call{CallKind::answer, prompt, frames, frames};
            double answer_cost =
                call_cost_ms(answer_call, options.search.cost_table, options.search.prefix_cache);

            std::string text = backend->answer(prompt);
            std::optional<std::string> label = extract_answer_label(text, sample.options);
            predicted_labels[i] = label.value_or("");

            predictions[i].predicted = result.best_windows;
            rec.iou = sample.ground_truth
                          ? sample_iou(result.best_windows, predictions[i].truth, options.top_one)
                          : 0.0;
            rec.steps = result.steps;
            rec.cost_ms = result.modeled_cost_ms + answer_cost;
            rec.confidence = result.best_confidence;
            rec.correct = predicted_labels[i] == sample.answer_label;
            maybe_write_trace(options, sample.video_id, i, result);
        } catch (std::exception const& e) {
            rec.error = e.what();
        }
    });

    predictions.erase(std::remove_if(predictions.begin(), predictions.end(),
                                     [](ScoredPrediction const& p) { return p.truth.empty(); }),
                      predictions.end());
    if (!predictions.empty()) {
        report.recall = recall_at(predictions, {0.3, 0.5}, options.top_one);
        report.mean_iou_value = mean_iou(predictions, options.top_one);
    }
    report.vqa_accuracy_value = vqa_accuracy(predicted_labels, expected_labels);
    finalize_means(report);
    return report;
}

std::string metrics_csv(MetricsReport const& report) {
    std::string out = "id,iou,steps,cost_ms,correct\n";
    char buf[160];
    for (SampleRecord const& rec : report.per_sample) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%d,%.1f,%d\n", rec.id.c_str(), rec.iou,
                      rec.steps, rec.cost_ms, rec.correct ? 1 : 0);
        out += buf;
    }
    return out;
}

std::string calibration_csv(CalibrationReport const& report) {
    std::string out = "bin_lo,bin_hi,count,mean_confidence,mean_outcome\n";
    char buf[160];
    for (CalibrationBin const& bin : report.bins) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%zu,%.4f,%.4f\n", bin.lo, bin.hi, bin.count,
                      bin.mean_confidence, bin.mean_outcome);
        out += buf;
    }
    return out;
}

}  // namespace zoomv
