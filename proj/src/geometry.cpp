#include "vcad/geometry.hpp"

#include <algorithm>
#include <tuple>

namespace vcad {

bool BoundingBox::valid() const noexcept {
    return x_min >= 0.0 && y_min >= 0.0 && x_min < x_max && y_min < y_max;
}

std::optional<BoundingBox> intersection(const BoundingBox& a, const BoundingBox& b) {
    BoundingBox r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
                  std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
    if (r.x_min >= r.x_max || r.y_min >= r.y_max) {
        return std::nullopt;
    }
    return r;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const auto inter = intersection(a, b);
    if (!inter) {
        return 0.0;
    }
    const double i = inter->area();
    const double u = a.area() + b.area() - i;
    return u > 0.0 ? i / u : 0.0;
}

bool contains(const BoundingBox& outer, const BoundingBox& inner) {
    return outer.x_min <= inner.x_min && outer.y_min <= inner.y_min &&
           outer.x_max >= inner.x_max && outer.y_max >= inner.y_max;
}

MergeOutcome merge_detections(const BoundingBox& a, const BoundingBox& b, double threshold) {
    using Kind = MergeOutcome::Kind;
    if (contains(b, a)) {
        return {Kind::KeepFirst, {a}};
    }
    if (contains(a, b)) {
        return {Kind::KeepSecond, {b}};
    }
    if (iou(a, b) >= threshold) {
        // IOU ≥ threshold > 0 implies a non-empty overlap.
        return {Kind::Intersection, {*intersection(a, b)}};
    }
    return {Kind::Separate, {a, b}};
}

std::vector<MergedDetection> merge_frame_indexed(std::span<const BoundingBox> dets_a,
                                                 std::span<const BoundingBox> dets_b,
                                                 double threshold) {
    struct Candidate {
        double overlap;
        std::size_t ia;
        std::size_t ib;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < dets_a.size(); ++i) {
        for (std::size_t j = 0; j < dets_b.size(); ++j) {
            if (merge_detections(dets_a[i], dets_b[j], threshold).merged()) {
                candidates.push_back({iou(dets_a[i], dets_b[j]), i, j});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& l, const Candidate& r) {
        if (l.overlap != r.overlap) {
            return l.overlap > r.overlap;
        }
        const auto& bl = dets_a[l.ia];
        const auto& br = dets_a[r.ia];
        return std::tie(bl.x_min, bl.y_min, l.ia, l.ib) < std::tie(br.x_min, br.y_min, r.ia, r.ib);
    });

    std::vector<std::optional<std::size_t>> partner_of_a(dets_a.size());
    std::vector<bool> b_used(dets_b.size(), false);
    for (const auto& c : candidates) {
        if (partner_of_a[c.ia] || b_used[c.ib]) {
            continue;
        }
        partner_of_a[c.ia] = c.ib;
        b_used[c.ib] = true;
    }

    std::vector<MergedDetection> out;
    out.reserve(dets_a.size() + dets_b.size());
    for (std::size_t i = 0; i < dets_a.size(); ++i) {
        if (const auto j = partner_of_a[i]) {
            const auto merged = merge_detections(dets_a[i], dets_b[*j], threshold);
            out.push_back({merged.boxes.front(), i, *j});
        } else {
            out.push_back({dets_a[i], i, std::nullopt});
        }
    }
    for (std::size_t j = 0; j < dets_b.size(); ++j) {
        if (!b_used[j]) {
            out.push_back({dets_b[j], std::nullopt, j});
        }
    }
    return out;
}

std::vector<BoundingBox> merge_frame(std::span<const BoundingBox> dets_a,
                                     std::span<const BoundingBox> dets_b, double threshold) {
    std::vector<BoundingBox> out;
    for (const auto& m : merge_frame_indexed(dets_a, dets_b, threshold)) {
        out.push_back(m.box);
    }
    return out;
}

}  // namespace vcad
