#pragma once

#include <cstdint>
#include <vector>

#include "vcad/tracking.hpp"

namespace vcad {

enum class FeatureSource { Embedding128, Expression7 };

struct ChangeSample {
    std::int64_t frame_index = 0;
    double value = 0.0;
};

/// Frame-to-frame feature change for one participant.
struct ChangeSeries {
    TrackId track_id = 0;
    FeatureSource source = FeatureSource::Expression7;
    std::vector<ChangeSample> samples;

    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
    [[nodiscard]] std::vector<double> values() const;
};

struct LabelSample {
    std::int64_t frame_index = 0;
    Expression label = Expression::Neutral;
};

struct LabelSeries {
    TrackId track_id = 0;
    std::vector<LabelSample> samples;

    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
};

/// Euclidean distance between consecutive observations carrying the chosen
/// vector, stamped with the later frame. Observations without the vector are
/// spanned, not zero-filled. Fewer than two usable observations yield an
/// empty series.
ChangeSeries change_series(const Track& track, FeatureSource source);

/// Stored label where present, otherwise argmax of the expression vector
/// (ties resolved toward the earlier category). Observations with neither are skipped.
LabelSeries label_series(const Track& track);

/// Index of the largest component; first wins on ties.
Expression dominant_expression(const std::vector<double>& expression);

}  // namespace vcad
