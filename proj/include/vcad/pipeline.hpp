#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vcad/aggregation.hpp"
#include "vcad/detectors.hpp"
#include "vcad/features.hpp"
#include "vcad/stream_io.hpp"
#include "vcad/tracking.hpp"

namespace vcad {

struct PipelineConfig {
    DetectionMethod method = DetectionMethod::StatProfile;
    FeatureSource source = FeatureSource::Expression7;
    DetectorConfig detector;
    AggregationConfig aggregation;
    TrackingConfig tracking;
    double merge_iou = kDefaultMergeIou;
    double match_distance = 0.6;

    void validate() const;
};

std::string_view to_string(DetectionMethod m) noexcept;
DetectionMethod parse_method(std::string_view name);  // stat | arima | transitions
std::string_view to_string(FeatureSource s) noexcept;
FeatureSource parse_source(std::string_view name);  // expression | embedding
std::string_view to_string(StatMode m) noexcept;

/// Flat `key = value` document; `#` starts a comment. Unknown keys and
/// malformed values raise ConfigError naming the line.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
/// Writes every key with its current value; parse_config reads it back.
void write_config(const PipelineConfig& cfg, std::ostream& out);

struct TrackDiagnostics {
    TrackId track_id = 0;
    std::size_t observation_count = 0;
    ChangeSeries changes;
    LabelSeries labels;
    std::vector<AnomalyPoint> anomalies;
};

struct PipelineResult {
    std::vector<GroupEvent> events;
    std::vector<TrackDiagnostics> tracks;
    std::size_t meeting_size = 0;
    std::int64_t total_frames = 0;
};

/// Detector merge, tracking and per-track feature extraction; everything the
/// detection stage consumes. Independent of detector and aggregation settings.
struct PreparedMeeting {
    std::vector<Track> tracks;
    std::vector<ChangeSeries> changes;
    std::vector<LabelSeries> labels;
    std::int64_t total_frames = 0;
    double fps = 4.0;

    [[nodiscard]] std::size_t meeting_size() const noexcept { return tracks.size(); }
};

PreparedMeeting prepare_meeting(const FeatureStream& stream, const PipelineConfig& cfg);

/// Per-track anomaly points for the configured method. Throws ConfigError when
/// no track carries the inputs the method needs.
std::vector<std::vector<AnomalyPoint>> detect_anomalies(const PreparedMeeting& meeting,
                                                        const PipelineConfig& cfg);

/// merge → track → feature change → detector → aggregate.
PipelineResult run_pipeline(const FeatureStream& stream, const PipelineConfig& cfg);

}  // namespace vcad
