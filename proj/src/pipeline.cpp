#include "vcad/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vcad/errors.hpp"

namespace vcad {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_fail(std::size_t line, const std::string& key, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ", key '" + key + "': " + what);
}

double to_double(const std::string& v, std::size_t line, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        config_fail(line, key, "expected a number, got '" + v + "'");
    }
    return out;
}

std::int64_t to_int(const std::string& v, std::size_t line, const std::string& key) {
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        config_fail(line, key, "expected an integer, got '" + v + "'");
    }
    return out;
}

// Selected vectors of each face, keyed by merged detection.
FaceObservation merged_observation(const MergedDetection& m, const std::vector<const StreamFace*>& a,
                                   const std::vector<const StreamFace*>& b) {
    const FaceObservation* primary = m.from_a ? &a[*m.from_a]->observation : nullptr;
    const FaceObservation* secondary = m.from_b ? &b[*m.from_b]->observation : nullptr;
    if (primary == nullptr) {
        std::swap(primary, secondary);
    }
    FaceObservation out = *primary;
    out.box = m.box;
    if (secondary != nullptr) {
        if (!out.has_embedding()) {
            out.embedding = secondary->embedding;
        }
        if (!out.has_expression()) {
            out.expression = secondary->expression;
        }
        if (!out.expression_label) {
            out.expression_label = secondary->expression_label;
        }
    }
    return out;
}

std::vector<FaceObservation> frame_faces(const FrameRecord& rec, double merge_iou) {
    std::vector<const StreamFace*> a;
    std::vector<const StreamFace*> b;
    std::vector<FaceObservation> plain;
    for (const auto& face : rec.faces) {
        switch (face.channel) {
            case Channel::A:
                a.push_back(&face);
                break;
            case Channel::B:
                b.push_back(&face);
                break;
            case Channel::None:
                plain.push_back(face.observation);
                break;
        }
    }
    if (a.empty() && b.empty()) {
        return plain;
    }
    std::vector<BoundingBox> boxes_a;
    std::vector<BoundingBox> boxes_b;
    for (const auto* f : a) {
        boxes_a.push_back(f->observation.box);
    }
    for (const auto* f : b) {
        boxes_b.push_back(f->observation.box);
    }
    for (const auto& m : merge_frame_indexed(boxes_a, boxes_b, merge_iou)) {
        plain.push_back(merged_observation(m, a, b));
    }
    return plain;
}

}  // namespace

void PipelineConfig::validate() const {
    detector.validate();
    aggregation.validate();
    if (!(merge_iou > 0.0 && merge_iou <= 1.0)) {
        throw ConfigError("merge_iou must lie in (0, 1]");
    }
    if (!(tracking.iou_threshold >= 0.0 && tracking.iou_threshold < 1.0)) {
        throw ConfigError("track_iou must lie in [0, 1)");
    }
    if (tracking.staleness_horizon < 0) {
        throw ConfigError("staleness_horizon must be non-negative");
    }
    if (!(match_distance > 0.0)) {
        throw ConfigError("match_distance must be positive");
    }
}

std::string_view to_string(DetectionMethod m) noexcept {
    switch (m) {
        case DetectionMethod::ArimaError:
            return "arima";
        case DetectionMethod::TransitionDensity:
            return "transitions";
        case DetectionMethod::StatProfile:
            break;
    }
    return "stat";
}

DetectionMethod parse_method(std::string_view name) {
    if (name == "stat") {
        return DetectionMethod::StatProfile;
    }
    if (name == "arima") {
        return DetectionMethod::ArimaError;
    }
    if (name == "transitions") {
        return DetectionMethod::TransitionDensity;
    }
    throw ConfigError("unknown method '" + std::string(name) + "' (stat|arima|transitions)");
}

std::string_view to_string(FeatureSource s) noexcept {
    return s == FeatureSource::Embedding128 ? "embedding" : "expression";
}

FeatureSource parse_source(std::string_view name) {
    if (name == "expression") {
        return FeatureSource::Expression7;
    }
    if (name == "embedding") {
        return FeatureSource::Embedding128;
    }
    throw ConfigError("unknown feature source '" + std::string(name) + "' (expression|embedding)");
}

std::string_view to_string(StatMode m) noexcept { return m == StatMode::Literal ? "literal" : "relative"; }

PipelineConfig parse_config(std::istream& in, PipelineConfig cfg) {
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) {
            text.erase(hash);
        }
        const std::string body = trim(text);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            config_fail(line, body, "expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        auto& det = cfg.detector;
        try {
            if (key == "method") {
                cfg.method = parse_method(value);
            } else if (key == "source") {
                cfg.source = parse_source(value);
            } else if (key == "window") {
                det.window_w = static_cast<int>(to_int(value, line, key));
            } else if (key == "std_threshold") {
                det.std_threshold = to_double(value, line, key);
            } else if (key == "stat_mode") {
                if (value != "relative" && value != "literal") {
                    config_fail(line, key, "expected relative|literal");
                }
                det.stat_mode = value == "literal" ? StatMode::Literal : StatMode::Relative;
            } else if (key == "mean_floor") {
                det.mean_floor = to_double(value, line, key);
            } else if (key == "std_floor_ratio") {
                det.std_floor_ratio = to_double(value, line, key);
            } else if (key == "arima_threshold") {
                det.arima_threshold = to_double(value, line, key);
            } else if (key == "arima_window") {
                det.arima_window = static_cast<int>(to_int(value, line, key));
            } else if (key == "arima_order") {
                ArimaOrder o;
                char c1 = 0;
                char c2 = 0;
                std::istringstream ss(value);
                if (!(ss >> o.p >> c1 >> o.d >> c2 >> o.q) || c1 != ',' || c2 != ',') {
                    config_fail(line, key, "expected p,d,q");
                }
                det.arima_order = o;
            } else if (key == "transition_window") {
                det.transition_window = static_cast<int>(to_int(value, line, key));
            } else if (key == "transition_fraction") {
                det.transition_fraction = to_double(value, line, key);
            } else if (key == "epsilon") {
                cfg.aggregation.epsilon = to_int(value, line, key);
            } else if (key == "participant_ratio") {
                cfg.aggregation.participant_ratio = to_double(value, line, key);
            } else if (key == "merge_iou") {
                cfg.merge_iou = to_double(value, line, key);
            } else if (key == "track_iou") {
                cfg.tracking.iou_threshold = to_double(value, line, key);
            } else if (key == "staleness_horizon") {
                cfg.tracking.staleness_horizon = to_int(value, line, key);
            } else if (key == "match_distance") {
                cfg.match_distance = to_double(value, line, key);
            } else {
                config_fail(line, key, "unknown key");
            }
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            if (what.rfind("config line", 0) == 0) {
                throw;
            }
            config_fail(line, key, what);
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return parse_config(in, base);
}

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void write_config(const PipelineConfig& cfg, std::ostream& out) {
    const auto& d = cfg.detector;
    out << "method = " << to_string(cfg.method) << '\n'
        << "source = " << to_string(cfg.source) << '\n'
        << "window = " << d.window_w << '\n'
        << "std_threshold = " << shortest(d.std_threshold) << '\n'
        << "stat_mode = " << to_string(d.stat_mode) << '\n'
        << "mean_floor = " << shortest(d.mean_floor) << '\n'
        << "std_floor_ratio = " << shortest(d.std_floor_ratio) << '\n'
        << "arima_threshold = " << shortest(d.arima_threshold) << '\n'
        << "arima_window = " << d.arima_window << '\n'
        << "arima_order = " << d.arima_order.p << ',' << d.arima_order.d << ',' << d.arima_order.q << '\n'
        << "transition_window = " << d.transition_window << '\n'
        << "transition_fraction = " << shortest(d.transition_fraction) << '\n'
        << "epsilon = " << cfg.aggregation.epsilon << '\n'
        << "participant_ratio = " << shortest(cfg.aggregation.participant_ratio) << '\n'
        << "merge_iou = " << shortest(cfg.merge_iou) << '\n'
        << "track_iou = " << shortest(cfg.tracking.iou_threshold) << '\n'
        << "staleness_horizon = " << cfg.tracking.staleness_horizon << '\n'
        << "match_distance = " << shortest(cfg.match_distance) << '\n';
}

PreparedMeeting prepare_meeting(const FeatureStream& stream, const PipelineConfig& cfg) {
    PreparedMeeting meeting;
    meeting.total_frames = stream.total_frames();
    meeting.fps = stream.metadata.fps;
    Tracker tracker(cfg.tracking);
    EmbeddingMatcher matcher(cfg.match_distance);
    for (const auto& rec : stream.frames) {
        auto faces = frame_faces(rec, cfg.merge_iou);
        tracker.associate_frame(faces, matcher);
    }
    meeting.tracks = tracker.tracks();
    for (const auto& track : meeting.tracks) {
        meeting.changes.push_back(change_series(track, cfg.source));
        meeting.labels.push_back(label_series(track));
    }
    return meeting;
}

std::vector<std::vector<AnomalyPoint>> detect_anomalies(const PreparedMeeting& meeting,
                                                        const PipelineConfig& cfg) {
    std::vector<std::vector<AnomalyPoint>> out(meeting.tracks.size());
    if (meeting.tracks.empty()) {
        return out;
    }
    const bool transitions = cfg.method == DetectionMethod::TransitionDensity;
    const bool usable =
        transitions ? std::any_of(meeting.labels.begin(), meeting.labels.end(),
                                  [](const LabelSeries& s) { return !s.empty(); })
                    : std::any_of(meeting.changes.begin(), meeting.changes.end(),
                                  [](const ChangeSeries& s) { return !s.empty(); });
    if (!usable) {
        throw ConfigError(transitions
                              ? "method 'transitions' needs expression labels or vectors; the stream has none"
                              : "method '" + std::string(to_string(cfg.method)) + "' needs " +
                                    std::string(to_string(cfg.source)) +
                                    " vectors; the stream has none (try a different source)");
    }
    for (std::size_t t = 0; t < meeting.tracks.size(); ++t) {
        switch (cfg.method) {
            case DetectionMethod::StatProfile:
                out[t] = detect_statistical(meeting.changes[t], cfg.detector);
                break;
            case DetectionMethod::ArimaError:
                out[t] = detect_arima(meeting.changes[t], cfg.detector);
                break;
            case DetectionMethod::TransitionDensity:
                out[t] = detect_transitions(meeting.labels[t], cfg.detector.transition_window,
                                            cfg.detector.transition_fraction);
                break;
        }
    }
    return out;
}

PipelineResult run_pipeline(const FeatureStream& stream, const PipelineConfig& cfg) {
    cfg.validate();
    auto meeting = prepare_meeting(stream, cfg);
    auto per_track = detect_anomalies(meeting, cfg);

    PipelineResult result;
    result.meeting_size = meeting.meeting_size();
    result.total_frames = meeting.total_frames;
    std::vector<AnomalyPoint> all;
    for (std::size_t t = 0; t < meeting.tracks.size(); ++t) {
        all.insert(all.end(), per_track[t].begin(), per_track[t].end());
        result.tracks.push_back({meeting.tracks[t].id, meeting.tracks[t].observations.size(),
                                 std::move(meeting.changes[t]), std::move(meeting.labels[t]),
                                 std::move(per_track[t])});
    }
    if (result.meeting_size > 0) {
        result.events = aggregate(all, result.meeting_size, cfg.aggregation);
    }
    return result;
}

}  // namespace vcad
