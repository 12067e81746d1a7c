#include "vcad/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "vcad/errors.hpp"

namespace vcad {

void AggregationConfig::validate() const {
    if (epsilon < 1) {
        throw ConfigError("epsilon must be at least 1 frame");
    }
    if (!(participant_ratio > 0.0 && participant_ratio <= 1.0)) {
        throw ConfigError("participant_ratio must lie in (0, 1]");
    }
}

namespace {

// Input indices sorted by frame (stable) and the core flag of each sorted position.
struct Density {
    std::vector<std::size_t> order;
    std::vector<bool> core;
};

Density density(std::span<const TimePoint> points, std::int64_t epsilon, std::size_t min_points) {
    const std::size_t n = points.size();
    Density d;
    d.order.resize(n);
    std::iota(d.order.begin(), d.order.end(), std::size_t{0});
    std::stable_sort(d.order.begin(), d.order.end(), [&](std::size_t l, std::size_t r) {
        return points[l].frame_index < points[r].frame_index;
    });
    const auto frame = [&](std::size_t k) { return points[d.order[k]].frame_index; };

    // Neighbourhood sizes with two pointers over the sorted frames.
    d.core.assign(n, false);
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t k = 0; k < n; ++k) {
        while (frame(k) - frame(lo) > epsilon) {
            ++lo;
        }
        hi = std::max(hi, k);
        while (hi + 1 < n && frame(hi + 1) - frame(k) <= epsilon) {
            ++hi;
        }
        d.core[k] = hi - lo + 1 >= min_points;
    }
    return d;
}

}  // namespace

std::vector<Cluster> dbscan_1d(std::span<const TimePoint> points, std::int64_t epsilon,
                               std::size_t min_points) {
    const std::size_t n = points.size();
    const auto [order, core] = density(points, epsilon, min_points);
    const auto frame = [&](std::size_t k) { return points[order[k]].frame_index; };

    // Consecutive cores within epsilon share a cluster.
    std::vector<std::optional<std::size_t>> label(n);
    std::vector<std::size_t> core_positions;
    std::size_t clusters = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!core[k]) {
            continue;
        }
        if (core_positions.empty() || frame(k) - frame(core_positions.back()) > epsilon) {
            ++clusters;
        }
        label[k] = clusters - 1;
        core_positions.push_back(k);
    }

    // Border points: nearest core by frame distance, earlier core on ties.
    std::size_t next_core = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (core[k]) {
            continue;
        }
        while (next_core < core_positions.size() && frame(core_positions[next_core]) < frame(k)) {
            ++next_core;
        }
        std::optional<std::size_t> best;
        std::int64_t best_gap = epsilon + 1;
        if (next_core > 0) {
            const std::size_t c = core_positions[next_core - 1];
            best_gap = frame(k) - frame(c);
            best = c;
        }
        if (next_core < core_positions.size()) {
            const std::size_t c = core_positions[next_core];
            const std::int64_t gap = frame(c) - frame(k);
            if (gap < best_gap) {
                best_gap = gap;
                best = c;
            }
        }
        if (best && best_gap <= epsilon) {
            label[k] = label[*best];
        }
    }

    std::vector<Cluster> out(clusters);
    for (std::size_t k = 0; k < n; ++k) {
        if (label[k]) {
            out[*label[k]].push_back(order[k]);
        }
    }
    return out;
}

std::size_t min_points_for(std::size_t meeting_size, double ratio) {
    if (meeting_size == 0) {
        throw ConfigError("meeting size must be at least 1");
    }
    const auto required =
        static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(meeting_size) - 1e-9));
    return std::max<std::size_t>(required, 2);
}

std::vector<GroupEvent> aggregate(std::span<const AnomalyPoint> points, std::size_t meeting_size,
                                  const AggregationConfig& cfg) {
    cfg.validate();
    if (points.empty()) {
        return {};
    }
    const std::size_t required = min_points_for(meeting_size, cfg.participant_ratio);
    std::vector<TimePoint> times;
    times.reserve(points.size());
    for (const auto& p : points) {
        times.push_back({p.frame_index, p.track_id});
    }
    const auto [order, core] = density(times, cfg.epsilon, required);
    const std::size_t n = order.size();
    const auto frame = [&](std::size_t k) { return times[order[k]].frame_index; };

    // Each chain of cores claims every point within epsilon of it; a border
    // point between two chains counts for both.
    std::vector<GroupEvent> events;
    std::size_t prev_lo = 0;  // sorted-index range of events.back()
    std::size_t lo = 0;
    for (std::size_t k = 0; k < n;) {
        if (!core[k]) {
            ++k;
            continue;
        }
        std::size_t last = k;
        std::size_t j = k + 1;
        for (; j < n; ++j) {
            if (!core[j]) {
                continue;
            }
            if (frame(j) - frame(last) > cfg.epsilon) {
                break;
            }
            last = j;
        }
        while (frame(k) - frame(lo) > cfg.epsilon) {
            ++lo;
        }
        std::size_t hi = last;
        while (hi + 1 < n && frame(hi + 1) - frame(last) <= cfg.epsilon) {
            ++hi;
        }
        GroupEvent ev;
        ev.start_frame = frame(lo);
        ev.end_frame = frame(hi);
        for (std::size_t m = lo; m <= hi; ++m) {
            ev.participant_ids.insert(times[order[m]].track_id);
        }
        ev.point_count = hi - lo + 1;
        if (ev.participant_ids.size() >= required) {
            if (!events.empty() && events.back().end_frame >= ev.start_frame) {
                // Shared border frame: fold into the previous event.
                auto& prev = events.back();
                prev.participant_ids.insert(ev.participant_ids.begin(), ev.participant_ids.end());
                prev.point_count = hi - prev_lo + 1;
                prev.end_frame = ev.end_frame;
            } else {
                prev_lo = lo;
                events.push_back(std::move(ev));
            }
        }
        k = j;
    }
    return events;
}

}  // namespace vcad
