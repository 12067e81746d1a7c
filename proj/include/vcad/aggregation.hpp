#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "vcad/detectors.hpp"

namespace vcad {

struct TimePoint {
    std::int64_t frame_index = 0;
    TrackId track_id = 0;
};

/// Indices into the input point list, ascending by (frame, input index).
using Cluster = std::vector<std::size_t>;

/// DBSCAN on the frame axis. A core point has at least `min_points` points
/// (itself included) within `epsilon` frames. Cores closer than `epsilon`
/// chain into one cluster; a border point joins the cluster of its nearest
/// core, the earlier cluster on ties. Clusters are ordered by first frame.
std::vector<Cluster> dbscan_1d(std::span<const TimePoint> points, std::int64_t epsilon,
                               std::size_t min_points);

/// ceil(ratio · meeting_size), never below 2.
std::size_t min_points_for(std::size_t meeting_size, double ratio);

struct GroupEvent {
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    std::set<TrackId> participant_ids;
    std::size_t point_count = 0;

    friend bool operator==(const GroupEvent&, const GroupEvent&) = default;
};

struct AggregationConfig {
    std::int64_t epsilon = 9;
    double participant_ratio = 0.5;

    void validate() const;
};

/// Clusters the points with min_points = min_points_for(meeting_size, ratio)
/// and keeps clusters that involve at least that many distinct tracks.
std::vector<GroupEvent> aggregate(std::span<const AnomalyPoint> points, std::size_t meeting_size,
                                  const AggregationConfig& cfg);

}  // namespace vcad
