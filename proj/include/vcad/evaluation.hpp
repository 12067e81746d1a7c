#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vcad/aggregation.hpp"
#include "vcad/pipeline.hpp"
#include "vcad/stream_io.hpp"

namespace vcad {

/// Frame-level confusion counts and derived rates. A rate whose denominator
/// is zero is NaN.
struct EvalReport {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
    double recall = 0.0;
    double precision = 0.0;
    double tnr = 0.0;
    double fpr = 0.0;

    static EvalReport from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn);
    [[nodiscard]] std::int64_t total() const noexcept { return tp + fp + tn + fn; }
    [[nodiscard]] double f1() const noexcept;
    EvalReport& operator+=(const EvalReport& other);
};

/// Binarises events and truth windows (inclusive) over [0, total_frames) and
/// counts agreement frame by frame.
EvalReport score(std::span<const GroupEvent> events, std::span<const GroundTruthWindow> truth,
                 std::int64_t total_frames);

/// Window-overlap matching: a truth window is found when some event overlaps
/// it; an event is correct when it overlaps some truth window.
struct EventMatch {
    std::size_t truth_total = 0;
    std::size_t truth_found = 0;
    std::size_t predicted_total = 0;
    std::size_t predicted_correct = 0;

    [[nodiscard]] double recall() const noexcept;
    [[nodiscard]] double precision() const noexcept;
    EventMatch& operator+=(const EventMatch& other);
};

EventMatch match_events(std::span<const GroupEvent> events, std::span<const GroundTruthWindow> truth);

// ---------------------------------------------------------------------------
// Cross-validated parameter sweeps

/// One grid coordinate. `window` and `threshold` bind to the method's own
/// parameters: (window_w, std_threshold) for stat, (arima_window,
/// arima_threshold) for arima, (transition_window, transition_fraction) for
/// transitions.
struct GridPoint {
    int window = 7;
    double threshold = 1.8;
    std::int64_t epsilon = 9;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct SweepGrid {
    std::vector<int> windows;
    std::vector<double> thresholds;
    std::vector<std::int64_t> epsilons;

    [[nodiscard]] std::size_t size() const noexcept {
        return windows.size() * thresholds.size() * epsilons.size();
    }
    /// Sorted cartesian product (window, threshold, epsilon).
    [[nodiscard]] std::vector<GridPoint> points() const;
};

/// Default search grids: stat windows 5..15 step 2, thresholds 1.5..3.0 step
/// 0.1; transition windows 3..9 step 2 at the base fraction; arima thresholds
/// 0.3..0.9 step 0.1 at the base window; epsilon 5..21 step 2 throughout.
SweepGrid default_grid(DetectionMethod method, const PipelineConfig& base);

PipelineConfig apply(const GridPoint& point, const PipelineConfig& base);

enum class Objective { Precision, Recall, F1 };
Objective parse_objective(std::string_view name);
std::string_view to_string(Objective o) noexcept;

struct SweepVideo {
    std::string name;
    FeatureStream stream;
    std::vector<GroundTruthWindow> truth;
};

struct SweepOptions {
    std::size_t folds = 10;
    Objective objective = Objective::Precision;
    std::uint64_t seed = 0;
    /// Worker threads for per-video evaluation; results do not depend on it.
    unsigned threads = 1;
    /// For arima: choose the order by AIC over all tracks first (label-free).
    bool auto_arima_order = false;
};

/// Confusion counts of every grid point on every video.
struct SweepTable {
    std::vector<GridPoint> grid;
    std::vector<std::vector<EvalReport>> counts;  // [video][grid index]

    /// Grid index maximising the objective over `videos` (summed counts);
    /// ties prefer higher recall, then the earlier grid point (smaller
    /// window, threshold, epsilon).
    [[nodiscard]] std::size_t select(std::span<const std::size_t> videos, Objective objective) const;
    [[nodiscard]] EvalReport pooled(std::span<const std::size_t> videos, std::size_t grid_index) const;
};

SweepTable build_sweep_table(std::span<const SweepVideo> videos, const PipelineConfig& base,
                             const SweepGrid& grid, unsigned threads = 1);

struct FoldResult {
    std::vector<std::size_t> test_videos;
    GridPoint selected;
    EvalReport train;
    EvalReport test;
};

struct MeanMetrics {
    double recall = 0.0;
    double precision = 0.0;
    double tnr = 0.0;
    double fpr = 0.0;
};

struct SweepResult {
    DetectionMethod method = DetectionMethod::StatProfile;
    ArimaOrder arima_order = kDefaultArimaOrder;
    std::size_t grid_size = 0;
    std::vector<FoldResult> folds;
    /// Across-fold mean of each held-out metric, skipping undefined (NaN) folds.
    MeanMetrics mean;
};

/// Video-level k-fold split, per-fold selection on training videos,
/// held-out scoring. Throws ConfigError for an empty grid, folds < 2, or
/// fewer videos than folds.
SweepResult sweep(std::span<const SweepVideo> videos, const PipelineConfig& base, const SweepGrid& grid,
                  const SweepOptions& options);

/// Most frequent auto_order choice over every change series with ≥ 30
/// samples; ties go to the lexicographically smallest order.
ArimaOrder dataset_arima_order(std::span<const SweepVideo> videos, const PipelineConfig& base,
                               const AutoOrderOptions& options = {});

}  // namespace vcad
