#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vcad/features.hpp"
#include "vcad/forecast.hpp"

namespace vcad {

enum class DetectionMethod { StatProfile, ArimaError, TransitionDensity };

/// How the moving-average rule compares a sample with its trailing window.
enum class StatMode {
    /// (actual/mean - 1) > k · (std/mean): deviation from the moving average,
    /// in moving-std units, both relative to the moving average.
    Relative,
    /// actual/mean > k · std, taken verbatim. Not scale-invariant.
    Literal,
};

struct AnomalyPoint {
    TrackId track_id = 0;
    std::int64_t frame_index = 0;
    /// The quantity compared with the method's threshold; always above it.
    double score = 0.0;
    DetectionMethod method = DetectionMethod::StatProfile;
};

struct DetectorConfig {
    int window_w = 7;
    double std_threshold = 1.8;
    StatMode stat_mode = StatMode::Relative;
    double mean_floor = 1e-9;
    /// rolling std is floored at this fraction of the rolling mean.
    double std_floor_ratio = 0.1;

    double arima_threshold = 0.5;
    int arima_window = 20;
    ArimaOrder arima_order = kDefaultArimaOrder;
    double relative_error_floor = 1e-9;

    int transition_window = 5;
    double transition_fraction = 0.5;

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

struct RollingStat {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

/// Mean and std of the w values strictly before each index. The first w
/// entries are empty (warm-up).
std::vector<std::optional<RollingStat>> rolling_stats(const std::vector<double>& values, int w);
std::vector<std::optional<RollingStat>> rolling_stats(const ChangeSeries& series, int w);

/// Moving-average rule score per sample (the quantity compared with
/// std_threshold); warm-up samples are empty.
std::vector<std::optional<double>> statistical_scores(const ChangeSeries& series,
                                                       const DetectorConfig& cfg);

/// Moving-average rule over a change series.
std::vector<AnomalyPoint> detect_statistical(const ChangeSeries& series, const DetectorConfig& cfg);
std::vector<AnomalyPoint> detect_statistical(const ChangeSeries& series, int w, double threshold);

/// |predicted - actual| / max(|actual|, floor) per sample, where predicted is
/// the one-step forecast of a model fitted on the preceding arima_window
/// values. Warm-up samples and failed fits are empty.
std::vector<std::optional<double>> arima_relative_errors(const ChangeSeries& series,
                                                          const DetectorConfig& cfg);

/// Flags samples whose forecast relative error exceeds cfg.arima_threshold.
std::vector<AnomalyPoint> detect_arima(const ChangeSeries& series, const DetectorConfig& cfg);

/// Share of consecutive label changes inside the centered window around each
/// sample; edge samples without a full window are empty.
std::vector<std::optional<double>> transition_shares(const LabelSeries& labels, int window);

/// Flags samples whose centered-window change share strictly exceeds `fraction`.
std::vector<AnomalyPoint> detect_transitions(const LabelSeries& labels, int window, double fraction);

}  // namespace vcad
