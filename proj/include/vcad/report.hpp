#pragma once

// JSON and text renderings of pipeline outputs, plus scenario documents.

#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"
#include "vcad/evaluation.hpp"
#include "vcad/synth.hpp"

namespace vcad {

/// [{start_frame, end_frame, start_seconds, end_seconds, participants, method}, ...]
nlohmann::json events_to_json(std::span<const GroupEvent> events, double fps, DetectionMethod method);
std::vector<GroupEvent> events_from_json(const nlohmann::json& j);

/// Undefined rates serialise as null.
nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json sweep_to_json(const SweepResult& result);

void print_report(std::ostream& out, const EvalReport& report);
void print_sweep(std::ostream& out, const SweepResult& result);

/// A scenario document is either one explicit meeting
///   {"participants", "duration_frames", "noise_scale", "seed", "fps",
///    "dual_channel", "events": [{"onset_frame", "duration_frames",
///    "affected_fraction", "intensity", "label"}]}
/// or a batch of random meetings
///   {"meetings": N, "seed": S, "participants_min", "participants_max", ...}
/// (any ScenarioSpace field by name, plus "events_max": 0 for calm meetings).
std::vector<SyntheticScenario> scenarios_from_json(const nlohmann::json& j);

}  // namespace vcad
