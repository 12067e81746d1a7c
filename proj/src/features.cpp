#include "vcad/features.hpp"

#include <algorithm>

#include "vcad/kernels.hpp"

namespace vcad {

std::vector<double> ChangeSeries::values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.value);
    }
    return out;
}

ChangeSeries change_series(const Track& track, FeatureSource source) {
    ChangeSeries out{track.id, source, {}};
    const std::vector<double>* previous = nullptr;
    for (const auto& obs : track.observations) {
        const auto& vec = source == FeatureSource::Embedding128 ? obs.embedding : obs.expression;
        if (vec.empty()) {
            continue;
        }
        if (previous != nullptr && previous->size() == vec.size()) {
            out.samples.push_back({obs.frame_index, kernels::distance(*previous, vec)});
        }
        previous = &vec;
    }
    return out;
}

Expression dominant_expression(const std::vector<double>& expression) {
    const auto it = std::max_element(expression.begin(), expression.end());
    return static_cast<Expression>(std::distance(expression.begin(), it));
}

LabelSeries label_series(const Track& track) {
    LabelSeries out{track.id, {}};
    for (const auto& obs : track.observations) {
        if (obs.expression_label) {
            out.samples.push_back({obs.frame_index, *obs.expression_label});
        } else if (obs.has_expression()) {
            out.samples.push_back({obs.frame_index, dominant_expression(obs.expression)});
        }
    }
    return out;
}

}  // namespace vcad
