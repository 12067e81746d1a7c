#include "vcad/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcad/errors.hpp"

namespace vcad {

namespace {

// Sliding Welford accumulator; re-summed periodically to bound drift.
// Two passes over one window in extended precision; windows are short, and
// streaming updates drift by more than 1e-9 on heavy-tailed series.
RollingStat window_stat(const double* first, std::size_t count) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < count; ++i) {
        sum += first[i];
    }
    const long double mean = sum / static_cast<long double>(count);
    long double ss = 0.0L;
    for (std::size_t i = 0; i < count; ++i) {
        const long double d = first[i] - mean;
        ss += d * d;
    }
    return {static_cast<double>(mean),
            static_cast<double>(std::sqrt(ss / static_cast<long double>(count)))};
}

}  // namespace

void DetectorConfig::validate() const {
    if (window_w < 2) {
        throw ConfigError("window must be at least 2, got " + std::to_string(window_w));
    }
    if (!(std_threshold > 0.0) || !(arima_threshold > 0.0)) {
        throw ConfigError("detector thresholds must be positive");
    }
    if (arima_window < 2) {
        throw ConfigError("arima_window must be at least 2");
    }
    if (!arima_order.usable()) {
        throw ConfigError("arima_order is not a usable ARIMA order");
    }
    if (transition_window < 3 || transition_window % 2 == 0) {
        throw ConfigError("transition_window must be odd and at least 3, got " +
                          std::to_string(transition_window));
    }
    if (!(transition_fraction >= 0.0 && transition_fraction <= 1.0)) {
        throw ConfigError("transition_fraction must lie in [0, 1]");
    }
    if (!(mean_floor > 0.0) || !(std_floor_ratio >= 0.0) || !(relative_error_floor > 0.0)) {
        throw ConfigError("detector floors must be positive");
    }
}

std::vector<std::optional<RollingStat>> rolling_stats(const std::vector<double>& values, int w) {
    if (w < 2) {
        throw ConfigError("rolling_stats: window must be at least 2");
    }
    const auto win = static_cast<std::size_t>(w);
    std::vector<std::optional<RollingStat>> out(values.size());
    if (values.size() <= win) {
        return out;
    }
    for (std::size_t i = win; i < values.size(); ++i) {
        out[i] = window_stat(values.data() + (i - win), win);
    }
    return out;
}

std::vector<std::optional<RollingStat>> rolling_stats(const ChangeSeries& series, int w) {
    return rolling_stats(series.values(), w);
}

std::vector<std::optional<double>> statistical_scores(const ChangeSeries& series,
                                                       const DetectorConfig& cfg) {
    const auto values = series.values();
    const auto stats = rolling_stats(values, cfg.window_w);
    std::vector<std::optional<double>> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!stats[i]) {
            continue;
        }
        const double mean = std::max(stats[i]->mean, cfg.mean_floor);
        const double sd = std::max(stats[i]->std, cfg.std_floor_ratio * mean);
        if (!(sd > 0.0)) {
            out[i] = 0.0;
        } else if (cfg.stat_mode == StatMode::Relative) {
            out[i] = (values[i] - mean) / sd;
        } else {
            out[i] = (values[i] / mean) / sd;
        }
    }
    return out;
}

std::vector<AnomalyPoint> detect_statistical(const ChangeSeries& series, const DetectorConfig& cfg) {
    const auto scores = statistical_scores(series, cfg);
    std::vector<AnomalyPoint> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] && *scores[i] > cfg.std_threshold) {
            out.push_back({series.track_id, series.samples[i].frame_index, *scores[i],
                           DetectionMethod::StatProfile});
        }
    }
    return out;
}

std::vector<AnomalyPoint> detect_statistical(const ChangeSeries& series, int w, double threshold) {
    DetectorConfig cfg;
    cfg.window_w = w;
    cfg.std_threshold = threshold;
    return detect_statistical(series, cfg);
}

std::vector<std::optional<double>> arima_relative_errors(const ChangeSeries& series,
                                                          const DetectorConfig& cfg) {
    const auto values = series.values();
    const auto win = static_cast<std::size_t>(cfg.arima_window);
    std::vector<std::optional<double>> out(values.size());
    for (std::size_t i = win; i < values.size(); ++i) {
        const std::span<const double> window(values.data() + (i - win), win);
        try {
            const auto model = fit(window, cfg.arima_order);
            const double predicted = forecast_one(model, window);
            if (!std::isfinite(predicted)) {
                continue;
            }
            out[i] = std::abs(predicted - values[i]) /
                     std::max(std::abs(values[i]), cfg.relative_error_floor);
        } catch (const EstimationError&) {
        }
    }
    return out;
}

std::vector<AnomalyPoint> detect_arima(const ChangeSeries& series, const DetectorConfig& cfg) {
    const auto errors = arima_relative_errors(series, cfg);
    std::vector<AnomalyPoint> out;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] && *errors[i] > cfg.arima_threshold) {
            out.push_back({series.track_id, series.samples[i].frame_index, *errors[i],
                           DetectionMethod::ArimaError});
        }
    }
    return out;
}

std::vector<std::optional<double>> transition_shares(const LabelSeries& labels, int window) {
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("transition window must be odd and at least 3");
    }
    const auto& s = labels.samples;
    const auto half = static_cast<std::size_t>(window / 2);
    std::vector<std::optional<double>> out(s.size());
    if (s.size() < static_cast<std::size_t>(window)) {
        return out;
    }
    // changes[i] = 1 when sample i differs from sample i-1.
    std::vector<int> prefix(s.size() + 1, 0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        prefix[i + 1] = prefix[i] + (s[i].label != s[i - 1].label ? 1 : 0);
    }
    const double pairs = static_cast<double>(window - 1);
    for (std::size_t i = half; i + half < s.size(); ++i) {
        // Pairs (j-1, j) for j in (i-half, i+half].
        const int changes = prefix[i + half + 1] - prefix[i - half + 1];
        out[i] = static_cast<double>(changes) / pairs;
    }
    return out;
}

std::vector<AnomalyPoint> detect_transitions(const LabelSeries& labels, int window, double fraction) {
    const auto shares = transition_shares(labels, window);
    std::vector<AnomalyPoint> out;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        if (shares[i] && *shares[i] > fraction) {
            out.push_back({labels.track_id, labels.samples[i].frame_index, *shares[i],
                           DetectionMethod::TransitionDensity});
        }
    }
    return out;
}

}  // namespace vcad
