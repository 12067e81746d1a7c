#include "vcad/tracking.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <tuple>

#include "vcad/errors.hpp"
#include "vcad/kernels.hpp"

namespace vcad {

namespace {

constexpr std::array<std::string_view, kExpressionCount> kExpressionNames = {
    "Happiness", "Anger", "Sadness", "Disgust", "Surprise", "Fear", "Neutral"};

// Kuhn's augmenting-path search over the admissible edges.
bool augment(std::size_t face, const std::vector<std::vector<std::size_t>>& edges,
             std::vector<bool>& visited, std::vector<std::optional<std::size_t>>& track_owner) {
    for (const std::size_t t : edges[face]) {
        if (visited[t]) {
            continue;
        }
        visited[t] = true;
        if (!track_owner[t] || augment(*track_owner[t], edges, visited, track_owner)) {
            track_owner[t] = face;
            return true;
        }
    }
    return false;
}

}  // namespace

std::string_view to_string(Expression e) noexcept {
    return kExpressionNames[static_cast<std::size_t>(e)];
}

std::optional<Expression> parse_expression(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kExpressionNames.size(); ++i) {
        if (kExpressionNames[i] == name) {
            return static_cast<Expression>(i);
        }
    }
    return std::nullopt;
}

EmbeddingMatcher::EmbeddingMatcher(double distance_threshold) : threshold_(distance_threshold) {
    if (!(distance_threshold > 0.0)) {
        throw ConfigError("embedding matcher threshold must be positive");
    }
}

std::optional<TrackId> EmbeddingMatcher::match(const FaceObservation& query,
                                               std::span<const Track* const> candidates) {
    if (!query.has_embedding()) {
        return std::nullopt;
    }
    std::optional<TrackId> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const Track* track : candidates) {
        // Latest observation that carries an embedding.
        const auto it = std::find_if(track->observations.rbegin(), track->observations.rend(),
                                     [](const FaceObservation& o) { return o.has_embedding(); });
        if (it == track->observations.rend() || it->embedding.size() != query.embedding.size()) {
            continue;
        }
        const double d = kernels::distance(query.embedding, it->embedding);
        if (d < best_distance) {
            best_distance = d;
            best = track->id;
        }
    }
    if (best && best_distance < threshold_) {
        return best;
    }
    return std::nullopt;
}

std::unique_ptr<IdentityMatcher> default_matcher(double distance_threshold) {
    return std::make_unique<EmbeddingMatcher>(distance_threshold);
}

Tracker::Tracker(TrackingConfig config) : config_(config) {}

std::vector<std::size_t> Tracker::active_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (step_ - last_seen_step_[i] <= config_.staleness_horizon) {
            out.push_back(i);
        }
    }
    return out;
}

bool Tracker::try_overlap_assignment(std::span<const FaceObservation> faces,
                                     std::span<const std::size_t> active) {
    if (faces.size() != active.size() || faces.empty()) {
        return false;
    }
    std::vector<std::vector<std::size_t>> edges(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (std::size_t t = 0; t < active.size(); ++t) {
            if (iou(faces[f].box, tracks_[active[t]].last().box) > config_.iou_threshold) {
                edges[f].push_back(t);
            }
        }
        if (edges[f].empty()) {
            return false;
        }
    }
    std::vector<std::optional<std::size_t>> owner(active.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        std::vector<bool> visited(active.size(), false);
        if (!augment(f, edges, visited, owner)) {
            return false;
        }
    }
    for (std::size_t t = 0; t < active.size(); ++t) {
        tracks_[active[t]].observations.push_back(faces[*owner[t]]);
        last_seen_step_[active[t]] = step_;
    }
    return true;
}

void Tracker::associate_frame(std::span<const FaceObservation> faces, IdentityMatcher& matcher) {
    if (!faces.empty()) {
        const std::int64_t frame = faces.front().frame_index;
        for (const auto& f : faces) {
            if (f.frame_index != frame) {
                throw ValidationError("associate_frame: faces span multiple frame indices (" +
                                      std::to_string(frame) + ", " +
                                      std::to_string(f.frame_index) + ")");
            }
        }
        if (last_frame_ && frame <= *last_frame_) {
            throw ValidationError("associate_frame: frame " + std::to_string(frame) +
                                  " is not after frame " + std::to_string(*last_frame_));
        }
        last_frame_ = frame;
    }
    ++step_;
    if (faces.empty()) {
        return;
    }

    const auto active = active_indices();
    if (try_overlap_assignment(faces, active)) {
        return;
    }

    // Deterministic face order: top-to-bottom, left-to-right.
    std::vector<std::size_t> order(faces.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        const auto& bl = faces[l].box;
        const auto& br = faces[r].box;
        return std::tie(bl.y_min, bl.x_min, l) < std::tie(br.y_min, br.x_min, r);
    });

    std::vector<bool> claimed(tracks_.size(), false);
    for (const std::size_t fi : order) {
        std::vector<const Track*> candidates;
        for (const std::size_t t : active) {
            if (!claimed[t]) {
                candidates.push_back(&tracks_[t]);
            }
        }
        std::optional<std::size_t> target;
        if (!candidates.empty()) {
            if (const auto id = matcher.match(faces[fi], candidates)) {
                for (const std::size_t t : active) {
                    if (!claimed[t] && tracks_[t].id == *id) {
                        target = t;
                        break;
                    }
                }
            }
        }
        if (target) {
            claimed[*target] = true;
            tracks_[*target].observations.push_back(faces[fi]);
            last_seen_step_[*target] = step_;
        } else {
            tracks_.push_back(Track{next_id_++, {faces[fi]}});
            last_seen_step_.push_back(step_);
            claimed.push_back(true);
        }
    }
}

}  // namespace vcad
