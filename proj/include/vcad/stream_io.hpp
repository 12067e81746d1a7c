#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vcad/tracking.hpp"

namespace vcad {

/// Detector channel a face came from when two detectors feed one stream.
enum class Channel : std::uint8_t { None, A, B };

struct StreamFace {
    FaceObservation observation;
    Channel channel = Channel::None;

    friend bool operator==(const StreamFace&, const StreamFace&) = default;
};

struct FrameRecord {
    std::int64_t frame_index = 0;
    std::vector<StreamFace> faces;

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct StreamMetadata {
    double fps = 4.0;
    std::int64_t frame_count = 0;
    std::string source_id;

    friend bool operator==(const StreamMetadata&, const StreamMetadata&) = default;
};

/// Per-frame face observations of one meeting.
struct FeatureStream {
    StreamMetadata metadata;
    std::vector<FrameRecord> frames;

    /// frame_count from metadata, or one past the last frame when larger.
    [[nodiscard]] std::int64_t total_frames() const noexcept;

    friend bool operator==(const FeatureStream&, const FeatureStream&) = default;
};

/// JSON Lines: a header object {"format", "fps", "frame_count", "source"} then
/// one {"frame", "faces": [...]} object per line. Face objects hold "box"
/// [x_min, y_min, x_max, y_max] and optional "channel" ("a"|"b"),
/// "embedding" (128 numbers), "expression" (7 numbers), "label".
/// An empty input is a valid empty stream.
FeatureStream read_stream(std::istream& in);
FeatureStream read_stream(const std::filesystem::path& path);
void write_stream(const FeatureStream& stream, std::ostream& out);
void write_stream(const FeatureStream& stream, const std::filesystem::path& path);

/// Checks every stream invariant; throws ValidationError naming the frame and field.
void validate_stream(const FeatureStream& stream);

inline constexpr const char* kStreamFormat = "vcad-features/1";

struct GroundTruthWindow {
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;  // inclusive
    std::string label;

    friend bool operator==(const GroundTruthWindow&, const GroundTruthWindow&) = default;
};

/// CSV sidecar with header `start_seconds,end_seconds,label`. Seconds are
/// converted with round(seconds · fps).
std::vector<GroundTruthWindow> read_annotations(std::istream& in, double fps);
std::vector<GroundTruthWindow> read_annotations(const std::filesystem::path& path, double fps);
void write_annotations(const std::vector<GroundTruthWindow>& windows, double fps, std::ostream& out);
void write_annotations(const std::vector<GroundTruthWindow>& windows, double fps,
                       const std::filesystem::path& path);

}  // namespace vcad
