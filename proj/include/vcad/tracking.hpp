#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vcad/geometry.hpp"

namespace vcad {

/// Canonical expression categories. The declared order fixes both the
/// component order of expression vectors and argmax tie-breaking.
enum class Expression : std::uint8_t { Happiness, Anger, Sadness, Disgust, Surprise, Fear, Neutral };

inline constexpr std::size_t kExpressionCount = 7;
inline constexpr std::size_t kEmbeddingSize = 128;

std::string_view to_string(Expression e) noexcept;
std::optional<Expression> parse_expression(std::string_view name) noexcept;

using TrackId = std::uint32_t;

/// One face in one frame.
struct FaceObservation {
    std::int64_t frame_index = 0;
    BoundingBox box;
    std::vector<double> embedding;   // empty or kEmbeddingSize components
    std::vector<double> expression;  // empty or kExpressionCount posteriors
    std::optional<Expression> expression_label;

    [[nodiscard]] bool has_embedding() const noexcept { return !embedding.empty(); }
    [[nodiscard]] bool has_expression() const noexcept { return !expression.empty(); }
    friend bool operator==(const FaceObservation&, const FaceObservation&) = default;
};

/// A participant's time-ordered observations.
struct Track {
    TrackId id = 0;
    std::vector<FaceObservation> observations;

    [[nodiscard]] const FaceObservation& last() const { return observations.back(); }
};

/// Fallback identity association used when box overlap is inconclusive.
class IdentityMatcher {
public:
    virtual ~IdentityMatcher() = default;
    /// Returns the id of one of `candidates`, or nothing.
    virtual std::optional<TrackId> match(const FaceObservation& query,
                                         std::span<const Track* const> candidates) = 0;
};

/// Nearest last-embedding matcher: accepts the closest candidate whose
/// Euclidean distance is strictly below the threshold.
class EmbeddingMatcher final : public IdentityMatcher {
public:
    explicit EmbeddingMatcher(double distance_threshold);
    std::optional<TrackId> match(const FaceObservation& query,
                                 std::span<const Track* const> candidates) override;

private:
    double threshold_;
};

std::unique_ptr<IdentityMatcher> default_matcher(double distance_threshold);

struct TrackingConfig {
    double iou_threshold = 0.5;
    /// Processed frames without an observation before a track leaves the active set.
    std::int64_t staleness_horizon = 30;
};

/// Association state for one video. Frames must be applied in order.
class Tracker {
public:
    explicit Tracker(TrackingConfig config = {});

    /// Associates one frame's faces. Throws ValidationError on mixed or
    /// non-increasing frame indices.
    void associate_frame(std::span<const FaceObservation> faces, IdentityMatcher& matcher);

    /// All tracks ever opened, in creation order.
    [[nodiscard]] const std::vector<Track>& tracks() const noexcept { return tracks_; }
    /// Indices into tracks() currently eligible for association.
    [[nodiscard]] std::vector<std::size_t> active_indices() const;
    [[nodiscard]] std::size_t participant_count() const noexcept { return tracks_.size(); }

private:
    bool try_overlap_assignment(std::span<const FaceObservation> faces,
                                std::span<const std::size_t> active);

    TrackingConfig config_;
    std::vector<Track> tracks_;
    std::vector<std::int64_t> last_seen_step_;
    std::int64_t step_ = 0;
    std::optional<std::int64_t> last_frame_;
    TrackId next_id_ = 0;
};

}  // namespace vcad
