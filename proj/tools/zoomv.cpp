// zoomv command-line tool: search / eval / simulate / calibrate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zoomv/eval.hpp"
#include "zoomv/oracle_backend.hpp"
#include "zoomv/remote_backend.hpp"
#include "zoomv/rng.hpp"
#include "zoomv/search.hpp"
#include "zoomv/simulate.hpp"

namespace {

using namespace zoomv;

struct CommonOptions {
    std::string backend{"oracle"};
    std::string endpoint;
    std::string api_key;
    std::string model{"zoomv-lvlm"};
    std::string cost_table_path;
    std::string preset{"quality"};
    double epsilon{-1};
    double delta{-1};
    double split_ratio{-1};
    int frames_per_node{-1};
    int global_frames{64};
    int spotlight_frames{16};
    int max_steps{-1};
    std::uint64_t seed{0};
    double frame_interval{1.0};
    bool no_prefix_cache{false};
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--backend", opts.backend, "Inference backend: oracle or remote")
        ->check(CLI::IsMember({"oracle", "remote"}));
    cmd->add_option("--endpoint", opts.endpoint, "Remote endpoint URL (remote backend)");
    cmd->add_option("--api-key", opts.api_key, "Bearer token for the remote endpoint")
        ->envname("ZOOMV_API_KEY");
    cmd->add_option("--model", opts.model, "Model name sent on the wire");
    cmd->add_option("--cost-table", opts.cost_table_path, "JSON file overriding cost-model rows");
    cmd->add_option("--preset", opts.preset, "Search preset: quality (e=0.8, d=600) or fast (e=0.5, d=1200)")
        ->check(CLI::IsMember({"quality", "fast"}));
    cmd->add_option("--epsilon", opts.epsilon, "Confidence stop threshold in [0,1]");
    cmd->add_option("--delta", opts.delta, "Minimum sub-event duration in seconds");
    cmd->add_option("--split-ratio", opts.split_ratio, "Child length as a fraction of the parent");
    cmd->add_option("--frames-per-node", opts.frames_per_node, "Frames sampled per search node");
    cmd->add_option("--global-frames", opts.global_frames, "Global frames in the final input");
    cmd->add_option("--spotlight-frames", opts.spotlight_frames, "Spotlight frame budget");
    cmd->add_option("--max-steps", opts.max_steps, "Upper bound on search steps");
    cmd->add_option("--seed", opts.seed, "Root seed; all randomness derives from it");
    cmd->add_option("--frame-interval", opts.frame_interval,
                    "Synthesized timeline granularity in seconds");
    cmd->add_flag("--no-prefix-cache", opts.no_prefix_cache,
                  "Charge reflection prefill for all frames");
}

SearchConfig make_search_config(CommonOptions const& opts) {
    SearchConfig config =
        opts.preset == "fast" ? SearchConfig::fast() : SearchConfig::quality();
    if (opts.epsilon >= 0) config.epsilon = opts.epsilon;
    if (opts.delta >= 0) config.delta = opts.delta;
    if (opts.split_ratio >= 0) config.split_ratio = opts.split_ratio;
    if (opts.frames_per_node >= 0) config.frames_per_node = opts.frames_per_node;
    if (opts.max_steps >= 0) config.max_steps = opts.max_steps;
    config.reflect_detail_frames = opts.spotlight_frames;
    config.prefix_cache = !opts.no_prefix_cache;
    if (!opts.cost_table_path.empty()) {
        config.cost_table = CostTable::from_file(opts.cost_table_path);
    }
    return config;
}

AssemblyConfig make_assembly_config(CommonOptions const& opts) {
    AssemblyConfig config;
    config.global_frames = opts.global_frames;
    config.spotlight_frames_max = opts.spotlight_frames;
    return config;
}

void require_remote_settings(CommonOptions const& opts) {
    if (opts.backend == "remote" && opts.endpoint.empty()) {
        throw CLI::ValidationError("--backend remote requires --endpoint");
    }
}

std::shared_ptr<ModelBackend> make_remote_backend(CommonOptions const& opts) {
    RemoteConfig config;
    config.endpoint = opts.endpoint;
    config.model = opts.model;
    config.api_key = opts.api_key;
    return std::make_shared<RemoteBackend>(config);
}

WindowSet parse_gt_flag(std::string const& text) {
    SegmentInterval everywhere;
    everywhere.end = 1e12;
    WindowSet ws = parse_windows(text, everywhere);
    if (ws.empty()) {
        throw CLI::ValidationError("--gt must look like \"[[100, 150]]\"");
    }
    return ws;
}

VideoTimeline load_timeline_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open timeline file: " + path);
    nlohmann::json doc;
    in >> doc;
    VideoTimeline tl;
    tl.duration = doc.at("duration").get<double>();
    for (auto const& t : doc.at("frame_times")) tl.frame_times.push_back(t.get<double>());
    for (std::size_t i = 0; i < tl.frame_times.size(); ++i) {
        bool ordered = i == 0 || tl.frame_times[i] > tl.frame_times[i - 1];
        if (!ordered || tl.frame_times[i] > tl.duration) {
            throw std::runtime_error(
                "timeline frame_times must be strictly increasing and <= duration");
        }
    }
    return tl;
}

void write_file(std::string const& path, std::string const& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int cmd_search(CommonOptions const& opts, std::string const& query, double duration,
               std::string const& timeline_path, std::string const& gt_text, double sigma,
               double slope, double intercept, std::string const& trace_out) {
    require_remote_settings(opts);
    VideoTimeline timeline;
    if (!timeline_path.empty()) {
        timeline = load_timeline_file(timeline_path);
    } else if (duration > 0) {
        timeline = make_timeline(duration, opts.frame_interval);
    } else {
        throw CLI::ValidationError("search needs --duration or --timeline");
    }

    std::shared_ptr<ModelBackend> backend;
    if (opts.backend == "oracle") {
        if (gt_text.empty()) {
            throw CLI::ValidationError("--backend oracle requires --gt windows");
        }
        OracleSpec spec;
        spec.ground_truth = parse_gt_flag(gt_text);
        spec.window_noise_sigma = sigma;
        spec.calib_slope = slope;
        spec.calib_intercept = intercept;
        spec.seed = substream(opts.seed, "oracle");
        backend = std::make_shared<OracleBackend>(spec);
    } else {
        backend = make_remote_backend(opts);
    }

    SearchConfig config = make_search_config(opts);
    SearchResult result =
        hierarchical_search(timeline, SearchQuery{query, {}}, *backend, config);

    std::printf("%s\n", format_windows(result.best_windows).c_str());
    std::printf("steps=%d confidence=%.4f cost_ms=%.1f terminated_by=%s\n", result.steps,
                result.best_confidence, result.modeled_cost_ms,
                std::string(termination_name(result.terminated_by)).c_str());

    std::ofstream trace_file(trace_out, std::ios::binary);
    if (!trace_file) throw std::runtime_error("cannot write trace file " + trace_out);
    write_trace(result, trace_file);
    return 0;
}

int cmd_eval(CommonOptions const& opts, std::string const& corpus_path,
             std::string const& format_name, std::string const& task, int jobs,
             double sigma, std::string const& results_out, std::string const& trace_dir) {
    require_remote_settings(opts);
    BenchmarkOptions options;
    options.search = make_search_config(opts);
    options.assembly = make_assembly_config(opts);
    options.frame_interval = opts.frame_interval;
    options.jobs = jobs;
    options.trace_dir = trace_dir;

    std::uint64_t oracle_seed = substream(opts.seed, "oracle");
    std::shared_ptr<ModelBackend> remote;
    if (opts.backend == "remote") remote = make_remote_backend(opts);

    MetricsReport report;
    if (task == "qa") {
        QACorpus corpus = load_qa_corpus(corpus_path);
        if (corpus.skipped_lines > 0) {
            std::fprintf(stderr, "warning: skipped %d malformed line(s)\n",
                         corpus.skipped_lines);
        }
        QABackendFactory factory = [&](std::size_t index, QASample const& sample)
            -> std::shared_ptr<ModelBackend> {
            if (remote) return remote;
            OracleSpec spec;
            if (sample.ground_truth) {
                spec.ground_truth.windows.push_back(*sample.ground_truth);
                spec.ground_truth.normalized = true;
            }
            spec.window_noise_sigma = sigma;
            spec.seed = mix_seed(oracle_seed, index);
            spec.correct_label = sample.answer_label;
            return std::make_shared<OracleBackend>(spec);
        };
        report = run_qa_benchmark(corpus.samples, factory, options);
        std::printf("accuracy=%.4f", report.vqa_accuracy_value);
        for (auto const& [tau, rate] : report.recall) std::printf(" R@%.1f=%.4f", tau, rate);
        std::printf(" n=%zu mean_steps=%.2f mean_cost_ms=%.1f\n", report.sample_count,
                    report.mean_steps, report.mean_cost_ms);
    } else {
        CorpusFormat format = CorpusFormat::generic_jsonl;
        if (format_name == "charades_sta") format = CorpusFormat::charades_sta;
        else if (format_name == "activitynet_captions") format = CorpusFormat::activitynet_captions;
        GroundingCorpus corpus = load_grounding_corpus(corpus_path, format);
        if (corpus.skipped_lines > 0) {
            std::fprintf(stderr, "warning: skipped %d malformed line(s)\n",
                         corpus.skipped_lines);
        }
        GroundingBackendFactory factory = [&](std::size_t index, GroundingSample const& sample)
            -> std::shared_ptr<ModelBackend> {
            if (remote) return remote;
            OracleSpec spec;
            spec.ground_truth = sample.ground_truth;
            spec.window_noise_sigma = sigma;
            spec.seed = mix_seed(oracle_seed, index);
            return std::make_shared<OracleBackend>(spec);
        };
        report = run_benchmark(corpus.samples, factory, options);
        std::printf("R@0.3=%.4f R@0.5=%.4f R@0.7=%.4f mIoU=%.4f n=%zu mean_steps=%.2f "
                    "mean_cost_ms=%.1f\n",
                    report.recall[0.3], report.recall[0.5], report.recall[0.7],
                    report.mean_iou_value, report.sample_count, report.mean_steps,
                    report.mean_cost_ms);
    }
    write_file(results_out, metrics_csv(report));
    return 0;
}

int cmd_simulate(CommonOptions const& opts, std::vector<double> const& epsilons,
                 std::vector<double> const& deltas, int videos, double sigma,
                 double min_duration, double max_duration, std::string const& results_out) {
    SweepSpec spec;
    if (!epsilons.empty()) spec.epsilons = epsilons;
    if (!deltas.empty()) spec.deltas = deltas;
    spec.n_videos = videos;
    spec.seed = opts.seed;
    spec.window_noise_sigma = sigma;
    spec.min_duration = min_duration;
    spec.max_duration = max_duration;
    spec.base = make_search_config(opts);

    std::string csv = sweep_csv(run_sweep(spec));
    std::fputs(csv.c_str(), stdout);
    if (!results_out.empty()) write_file(results_out, csv);
    return 0;
}

int cmd_calibrate(CommonOptions const& opts, int videos, double sigma, int bins,
                  double min_duration, double max_duration, std::string const& results_out) {
    SearchConfig config = make_search_config(opts);
    auto pairs = collect_confidence_iou_pairs(videos, opts.seed, sigma, config, min_duration,
                                              max_duration);
    CalibrationReport report = calibration_bins(pairs, bins);
    std::string csv = calibration_csv(report);
    std::fputs(csv.c_str(), stdout);
    if (!results_out.empty()) write_file(results_out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zoomv: query-aware hierarchical temporal search over long videos"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");

    CommonOptions opts;

    // search
    auto* search = app.add_subcommand("search", "Run one hierarchical search");
    add_common_options(search, opts);
    std::string query, timeline_path, gt_text;
    std::string trace_out{"zoomv_trace.jsonl"};
    double duration = 0, sigma = 0, slope = 10.0, intercept = -5.0;
    search->add_option("--query", query, "Query or question text")->required();
    search->add_option("--duration", duration, "Video duration in seconds");
    search->add_option("--timeline", timeline_path,
                       "JSON timeline file {\"duration\", \"frame_times\"}");
    search->add_option("--gt", gt_text, "Oracle ground-truth windows, e.g. \"[[100, 150]]\"");
    search->add_option("--sigma", sigma, "Oracle grounding noise (seconds)");
    search->add_option("--slope", slope, "Oracle calibration slope");
    search->add_option("--intercept", intercept, "Oracle calibration intercept");
    search->add_option("--trace-out", trace_out, "Trace JSONL output path");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a corpus and report metrics");
    CommonOptions eval_opts;
    add_common_options(eval, eval_opts);
    std::string corpus_path, format_name{"generic_jsonl"}, task{"grounding"};
    std::string results_out{"zoomv_results.csv"}, trace_dir;
    int jobs = 1;
    double eval_sigma = 0;
    eval->add_option("--corpus", corpus_path, "Annotation file")->required();
    eval->add_option("--format", format_name, "Corpus format")
        ->check(CLI::IsMember({"charades_sta", "activitynet_captions", "generic_jsonl"}));
    eval->add_option("--task", task, "grounding or qa")
        ->check(CLI::IsMember({"grounding", "qa"}));
    eval->add_option("--jobs", jobs, "Concurrent sample evaluations");
    eval->add_option("--sigma", eval_sigma, "Oracle grounding noise (seconds)");
    eval->add_option("--results-out", results_out, "Per-sample results CSV path");
    eval->add_option("--trace-dir", trace_dir, "Directory for per-sample trace files");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Sweep epsilon/delta on synthetic videos");
    CommonOptions sim_opts;
    add_common_options(simulate, sim_opts);
    std::vector<double> epsilons, deltas;
    int videos = 20, bins = 10;
    double sim_sigma = 0, min_duration = 600, max_duration = 3600;
    std::string sim_out;
    simulate->add_option("--epsilons", epsilons, "Comma-separated epsilon values")
        ->delimiter(',');
    simulate->add_option("--deltas", deltas, "Comma-separated delta values")->delimiter(',');
    simulate->add_option("--videos", videos, "Synthetic videos per cell");
    simulate->add_option("--sigma", sim_sigma, "Oracle grounding noise (seconds)");
    simulate->add_option("--min-duration", min_duration, "Shortest synthetic video");
    simulate->add_option("--max-duration", max_duration, "Longest synthetic video");
    simulate->add_option("--results-out", sim_out, "Also write the CSV here");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate",
                                         "Bin search confidence against achieved IoU");
    CommonOptions cal_opts;
    add_common_options(calibrate, cal_opts);
    int cal_videos = 200;
    double cal_sigma = 30.0, cal_min = 600, cal_max = 3600;
    std::string cal_out;
    calibrate->add_option("--videos", cal_videos, "Number of seeded searches");
    calibrate->add_option("--sigma", cal_sigma, "Oracle grounding noise (seconds)");
    calibrate->add_option("--bins", bins, "Calibration bin count");
    calibrate->add_option("--min-duration", cal_min, "Shortest synthetic video");
    calibrate->add_option("--max-duration", cal_max, "Longest synthetic video");
    calibrate->add_option("--results-out", cal_out, "Also write the CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (search->parsed()) {
            return cmd_search(opts, query, duration, timeline_path, gt_text, sigma, slope,
                              intercept, trace_out);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_opts, corpus_path, format_name, task, jobs, eval_sigma,
                            results_out, trace_dir);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_opts, epsilons, deltas, videos, sim_sigma, min_duration,
                                max_duration, sim_out);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(cal_opts, cal_videos, cal_sigma, bins, cal_min, cal_max,
                                 cal_out);
        }
    } catch (CLI::ValidationError const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (std::exception const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
