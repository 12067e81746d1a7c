#pragma once

#include <optional>
#include <span>
#include <vector>

namespace vcad {

/// Axis-aligned rectangle in pixel coordinates.
struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    [[nodiscard]] double width() const noexcept { return x_max - x_min; }
    [[nodiscard]] double height() const noexcept { return y_max - y_min; }
    [[nodiscard]] double area() const noexcept { return width() * height(); }
    /// Strictly positive area and non-negative coordinates.
    [[nodiscard]] bool valid() const noexcept;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Overlap rectangle, or nothing when the boxes do not overlap with positive area.
std::optional<BoundingBox> intersection(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union in [0, 1]; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// True when `inner` lies entirely inside `outer` (a ∩ b = inner).
bool contains(const BoundingBox& outer, const BoundingBox& inner);

/// Outcome of merging two detections of possibly the same face.
struct MergeOutcome {
    enum class Kind { KeepFirst, KeepSecond, Intersection, Separate };
    Kind kind = Kind::Separate;
    std::vector<BoundingBox> boxes;  // one box, or {a, b} for Separate

    [[nodiscard]] bool merged() const noexcept { return kind != Kind::Separate; }
};

/// The two-detector merge rule, cases evaluated in order:
///   a if a ∩ b = a, b if a ∩ b = b, a ∩ b if IOU(a, b) ≥ threshold, otherwise {a, b}.
MergeOutcome merge_detections(const BoundingBox& a, const BoundingBox& b, double threshold);

/// One output box of merge_frame together with the inputs it came from.
struct MergedDetection {
    BoundingBox box;
    std::optional<std::size_t> from_a;
    std::optional<std::size_t> from_b;
};

/// Merges two detectors' outputs for one frame. Pairs are formed greedily by
/// descending IOU among pairs that merge_detections would fuse into one box;
/// ties go to the lexicographically smaller (x_min, y_min) of the first box.
/// Unpaired boxes pass through. Output order: channel-a boxes (merged or not)
/// in input order, then unpaired channel-b boxes in input order.
std::vector<MergedDetection> merge_frame_indexed(std::span<const BoundingBox> dets_a,
                                                 std::span<const BoundingBox> dets_b,
                                                 double threshold);

std::vector<BoundingBox> merge_frame(std::span<const BoundingBox> dets_a,
                                     std::span<const BoundingBox> dets_b, double threshold);

inline constexpr double kDefaultMergeIou = 0.8;

}  // namespace vcad
