// Command line front end: detect, evaluate, sweep, synth.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcad/errors.hpp"
#include "vcad/evaluation.hpp"
#include "vcad/kernels.hpp"
#include "vcad/pipeline.hpp"
#include "vcad/report.hpp"
#include "vcad/stream_io.hpp"
#include "vcad/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string config_path;
    std::string method;
    std::string source;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--method", opts.method, "stat | arima | transitions");
    cmd->add_option("--source", opts.source, "expression | embedding");
}

vcad::PipelineConfig resolve(const CommonOptions& opts) {
    vcad::PipelineConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = vcad::load_config(opts.config_path);
    }
    if (!opts.method.empty()) {
        cfg.method = vcad::parse_method(opts.method);
    }
    if (!opts.source.empty()) {
        cfg.source = vcad::parse_source(opts.source);
    }
    cfg.validate();
    return cfg;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

std::vector<vcad::SweepVideo> load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw vcad::ValidationError("dataset directory not found: " + dir.string());
    }
    std::vector<fs::path> streams;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".jsonl") {
            streams.push_back(entry.path());
        }
    }
    std::sort(streams.begin(), streams.end());
    std::vector<vcad::SweepVideo> videos;
    for (const auto& path : streams) {
        auto annotations = path;
        annotations.replace_extension(".csv");
        if (!fs::exists(annotations)) {
            throw vcad::ValidationError("missing annotations for " + path.string() + " (expected " +
                                        annotations.string() + ")");
        }
        vcad::SweepVideo video;
        video.name = path.stem().string();
        video.stream = vcad::read_stream(path);
        video.truth = vcad::read_annotations(annotations, video.stream.metadata.fps);
        videos.push_back(std::move(video));
    }
    return videos;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-level abnormal event detection for video-conference feature streams"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "vcad 1.0 (distance kernel: " +
                                          std::string(vcad::kernels::isa_name(vcad::kernels::active_isa())) + ")");

    // detect
    auto* detect = app.add_subcommand("detect", "Detect group events in a feature stream");
    CommonOptions detect_opts;
    std::string detect_stream;
    std::string detect_out;
    std::string detect_diag;
    detect->add_option("stream", detect_stream, "Feature stream (.jsonl)")->required()->check(CLI::ExistingFile);
    detect->add_option("--out", detect_out, "Events output (.json); stdout when omitted");
    detect->add_option("--diagnostics", detect_diag, "Per-track change series and anomaly points (.json)");
    add_common(detect, detect_opts);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score detections against annotations");
    CommonOptions eval_opts;
    std::string eval_stream;
    std::string eval_annotations;
    std::string eval_out;
    evaluate->add_option("stream", eval_stream, "Feature stream (.jsonl)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("annotations", eval_annotations, "start_seconds,end_seconds,label CSV")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--out", eval_out, "Machine-readable summary (.json)");
    add_common(evaluate, eval_opts);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Cross-validated parameter sweep over a dataset directory");
    CommonOptions sweep_opts;
    std::string sweep_dir;
    std::string sweep_out;
    std::string objective = "precision";
    std::size_t folds = 10;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    bool auto_order = false;
    sweep_cmd->add_option("dataset-dir", sweep_dir, "Directory of <name>.jsonl + <name>.csv pairs")->required();
    sweep_cmd->add_option("--folds", folds, "Number of folds")->capture_default_str();
    sweep_cmd->add_option("--objective", objective, "precision | recall | f1")->capture_default_str();
    sweep_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sweep_cmd->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
    sweep_cmd->add_flag("--auto-order", auto_order, "Select the ARIMA order by AIC before sweeping");
    sweep_cmd->add_option("--out", sweep_out, "Machine-readable summary (.json)");
    add_common(sweep_cmd, sweep_opts);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic meetings with planted events");
    std::string scenario_path;
    std::string synth_out;
    synth->add_option("scenario", scenario_path, "Scenario document (.json)")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (detect->parsed()) {
            const auto cfg = resolve(detect_opts);
            const auto stream = vcad::read_stream(fs::path(detect_stream));
            const auto result = vcad::run_pipeline(stream, cfg);
            write_json(vcad::events_to_json(result.events, stream.metadata.fps, cfg.method), detect_out);
            if (!detect_diag.empty()) {
                nlohmann::json diag = nlohmann::json::array();
                for (const auto& t : result.tracks) {
                    nlohmann::json changes = nlohmann::json::array();
                    for (const auto& s : t.changes.samples) {
                        changes.push_back({s.frame_index, s.value});
                    }
                    nlohmann::json anomalies = nlohmann::json::array();
                    for (const auto& a : t.anomalies) {
                        anomalies.push_back({{"frame", a.frame_index}, {"score", a.score}});
                    }
                    diag.push_back({{"track", t.track_id},
                                    {"observations", t.observation_count},
                                    {"changes", changes},
                                    {"anomalies", anomalies}});
                }
                write_json(diag, detect_diag);
            }
            if (!detect_out.empty()) {
                std::cerr << result.events.size() << " group event(s) over " << result.meeting_size
                          << " participant track(s)\n";
            }
        } else if (evaluate->parsed()) {
            const auto cfg = resolve(eval_opts);
            const auto stream = vcad::read_stream(fs::path(eval_stream));
            const auto truth = vcad::read_annotations(fs::path(eval_annotations), stream.metadata.fps);
            const auto result = vcad::run_pipeline(stream, cfg);
            const auto report = vcad::score(result.events, truth, result.total_frames);
            const auto events = vcad::match_events(result.events, truth);
            vcad::print_report(std::cout, report);
            std::cout << "events  found " << events.truth_found << "/" << events.truth_total << ", correct "
                      << events.predicted_correct << "/" << events.predicted_total << '\n';
            if (!eval_out.empty()) {
                write_json({{"method", std::string(vcad::to_string(cfg.method))},
                            {"frames", vcad::report_to_json(report)},
                            {"events",
                             {{"truth_total", events.truth_total},
                              {"truth_found", events.truth_found},
                              {"predicted_total", events.predicted_total},
                              {"predicted_correct", events.predicted_correct}}},
                            {"detections", vcad::events_to_json(result.events, stream.metadata.fps, cfg.method)}},
                           eval_out);
            }
        } else if (sweep_cmd->parsed()) {
            const auto cfg = resolve(sweep_opts);
            const auto videos = load_dataset(sweep_dir);
            vcad::SweepOptions options;
            options.folds = folds;
            options.objective = vcad::parse_objective(objective);
            options.threads = threads;
            options.seed = seed;
            options.auto_arima_order = auto_order;
            const auto result = vcad::sweep(videos, cfg, vcad::default_grid(cfg.method, cfg), options);
            vcad::print_sweep(std::cout, result);
            if (!sweep_out.empty()) {
                write_json(vcad::sweep_to_json(result), sweep_out);
            }
        } else if (synth->parsed()) {
            std::ifstream in(scenario_path);
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw vcad::ValidationError(std::string("scenario file: ") + e.what());
            }
            const auto scenarios = vcad::scenarios_from_json(doc);
            fs::create_directories(synth_out);
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                const auto meeting = vcad::generate(scenarios[i]);
                char stem[32];
                std::snprintf(stem, sizeof stem, "meeting_%03zu", i);
                vcad::write_stream(meeting.stream, fs::path(synth_out) / (std::string(stem) + ".jsonl"));
                vcad::write_annotations(meeting.truth, meeting.stream.metadata.fps,
                                        fs::path(synth_out) / (std::string(stem) + ".csv"));
            }
            std::cerr << "wrote " << scenarios.size() << " meeting(s) to " << synth_out << '\n';
        }
    } catch (const vcad::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const vcad::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
