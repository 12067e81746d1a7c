#include <cmath>

#include "doctest.h"
#include "vcad/errors.hpp"
#include "vcad/features.hpp"
#include "vcad/report.hpp"
#include "vcad/synth.hpp"

using vcad::SyntheticEvent;
using vcad::SyntheticScenario;

namespace {

// Largest expression change of participant `i` inside [from, to].
double max_change(const vcad::FeatureStream& s, std::size_t i, std::int64_t from, std::int64_t to) {
    double best = 0.0;
    for (std::int64_t f = std::max<std::int64_t>(from, 1); f <= to; ++f) {
        const auto& a = s.frames[f - 1].faces[i].observation.expression;
        const auto& b = s.frames[f].faces[i].observation.expression;
        double d = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
        best = std::max(best, std::sqrt(d));
    }
    return best;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is a pure function of the scenario") {
    SyntheticScenario sc;
    sc.seed = 42;
    sc.events.push_back({300, 40, 1.0, 0.3, "x"});
    const auto a = vcad::generate(sc);
    const auto b = vcad::generate(sc);
    CHECK(a.stream == b.stream);
    CHECK(a.truth == b.truth);
    sc.seed = 43;
    CHECK_FALSE(vcad::generate(sc).stream == a.stream);
}

TEST_CASE("output passes stream validation") {
    SyntheticScenario sc;
    sc.participant_count = 9;
    sc.duration_frames = 400;
    sc.dual_channel = true;
    sc.events.push_back({100, 60, 0.8, 0.4, "x"});
    const auto m = vcad::generate(sc);
    CHECK_NOTHROW(vcad::validate_stream(m.stream));
    CHECK(m.stream.frames.size() == 400);
    CHECK(m.stream.frames[0].faces.size() == 18);
}

TEST_CASE("calm meetings have no truth and small steps") {
    SyntheticScenario sc;
    sc.participant_count = 5;
    const auto m = vcad::generate(sc);
    CHECK(m.truth.empty());
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(max_change(m.stream, i, 1, sc.duration_frames - 1) <= sc.noise_scale * (1 + sc.step_jitter) + 1e-12);
    }
}

TEST_CASE("a zero-intensity event changes nothing") {
    SyntheticScenario calm;
    calm.seed = 8;
    SyntheticScenario silent = calm;
    silent.events.push_back({200, 50, 1.0, 0.0, "nothing"});
    const auto a = vcad::generate(calm);
    const auto b = vcad::generate(silent);
    CHECK(b.truth.empty());
    CHECK(a.stream.frames == b.stream.frames);
}

TEST_CASE("affected participants are ceil(fraction * N)") {
    SyntheticScenario sc;
    sc.participant_count = 12;
    sc.duration_frames = 600;
    sc.seed = 3;
    sc.events.push_back({300, 60, 0.75, 0.3, "x"});
    const auto m = vcad::generate(sc);
    REQUIRE(m.truth.size() == 1);
    CHECK(m.truth[0].start_frame == 300);
    CHECK(m.truth[0].end_frame == 359);
    int jumped = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        // Onset jitter is at most two seconds.
        if (max_change(m.stream, i, 300, 308) > 0.1) ++jumped;
    }
    CHECK(jumped == 9);
}

TEST_CASE("invalid scenarios are rejected") {
    SyntheticScenario sc;
    sc.events.push_back({5000, 10, 1.0, 0.3, "late"});
    CHECK_THROWS_AS(vcad::generate(sc), vcad::ValidationError);
    sc.events = {{10, 0, 1.0, 0.3, "empty"}};
    CHECK_THROWS_AS(vcad::generate(sc), vcad::ValidationError);
    sc.events = {{10, 5, 0.0, 0.3, "nobody"}};
    CHECK_THROWS_AS(vcad::generate(sc), vcad::ValidationError);
    sc.events.clear();
    sc.participant_count = 0;
    CHECK_THROWS_AS(vcad::generate(sc), vcad::ValidationError);
}

TEST_CASE("random scenarios respect the space") {
    const vcad::ScenarioSpace space;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto sc = vcad::random_scenario(seed, space);
        CHECK_NOTHROW(sc.validate());
        CHECK(sc.participant_count >= space.participants_min);
        CHECK(sc.participant_count <= space.participants_max);
        CHECK(sc.events.size() >= space.events_min);
        CHECK(sc.events.size() <= space.events_max);
        for (std::size_t i = 0; i < sc.events.size(); ++i) {
            const auto& e = sc.events[i];
            CHECK(e.intensity >= space.intensity_min * space.noise_scale);
            CHECK(e.duration_frames >= std::llround(space.event_seconds_min * space.fps));
            CHECK(e.duration_frames <= std::llround(space.event_seconds_max * space.fps));
            CHECK(e.onset_frame + e.duration_frames <= sc.duration_frames);
            if (i > 0) CHECK(sc.events[i - 1].onset_frame + sc.events[i - 1].duration_frames < e.onset_frame);
        }
    }
}

TEST_CASE("scenario documents") {
    const auto one = vcad::scenarios_from_json(nlohmann::json::parse(R"({
        "participants": 6, "duration_frames": 500, "seed": 2,
        "events": [{"onset_frame": 100, "duration_frames": 20, "affected_fraction": 0.5,
                    "intensity": 0.3, "label": "laugh"}]})"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].participant_count == 6);
    CHECK(one[0].events[0].label == "laugh");

    const auto batch = vcad::scenarios_from_json(nlohmann::json::parse(
        R"({"meetings": 3, "seed": 10, "participants_max": 8, "events_max": 0, "events_min": 0})"));
    REQUIRE(batch.size() == 3);
    for (const auto& sc : batch) {
        CHECK(sc.participant_count <= 8);
        CHECK(sc.events.empty());
    }
    CHECK_THROWS_AS(vcad::scenarios_from_json(nlohmann::json::parse(R"({"participants": "many"})")),
                    vcad::ValidationError);
}

}  // TEST_SUITE
