#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcad/stream_io.hpp"

namespace vcad {

struct SyntheticEvent {
    std::int64_t onset_frame = 0;
    std::int64_t duration_frames = 1;
    double affected_fraction = 1.0;
    /// Euclidean size of the expression jump; 0 leaves the meeting unchanged.
    double intensity = 0.0;
    std::string label = "disruption";
};

struct SyntheticScenario {
    std::size_t participant_count = 4;
    std::int64_t duration_frames = 1200;
    std::vector<SyntheticEvent> events;
    /// Per-step Euclidean drift of the calm expression walk.
    double noise_scale = 0.02;
    std::uint64_t seed = 0;
    double fps = 4.0;
    /// Relative half-width of the uniform jitter on calm step lengths.
    double step_jitter = 0.08;
    /// Embeddings move by this multiple of the expression change.
    double embedding_scale = 0.5;
    /// Emit boxes from two detector channels per face.
    bool dual_channel = false;

    /// Throws ValidationError on violated invariants.
    void validate() const;
};

struct SyntheticMeeting {
    FeatureStream stream;
    std::vector<GroundTruthWindow> truth;
};

/// Calm participants random-walk around a resting expression with step length
/// noise_scale·(1 ± step_jitter). At each event a ceil(fraction·N) subset
/// jumps by `intensity` toward a two-category blend after an onset jitter of
/// up to two seconds, holds it for the event, then walks back at calm speed.
/// Deterministic in the scenario.
SyntheticMeeting generate(const SyntheticScenario& scenario);

/// Ranges for drawing random planted-event scenarios.
struct ScenarioSpace {
    std::size_t participants_min = 4;
    std::size_t participants_max = 25;
    std::int64_t duration_min = 1200;
    std::int64_t duration_max = 2400;
    std::size_t events_min = 1;
    std::size_t events_max = 3;
    double affected_min = 0.6;
    double affected_max = 1.0;
    /// Jump size as a multiple of noise_scale.
    double intensity_min = 8.0;
    double intensity_max = 20.0;
    double event_seconds_min = 2.0;
    double event_seconds_max = 40.0;
    double noise_scale = 0.02;
    double fps = 4.0;
    bool dual_channel = false;
};

/// Draws one scenario; event durations are log-uniform in seconds and events
/// are separated by enough calm time for participants to settle.
SyntheticScenario random_scenario(std::uint64_t seed, const ScenarioSpace& space = {});

}  // namespace vcad
