#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "vcad/errors.hpp"
#include "vcad/kernels.hpp"
#include "vcad/tracking.hpp"

using vcad::BoundingBox;
using vcad::FaceObservation;
using vcad::Track;
using vcad::TrackId;

namespace {

class CountingMatcher final : public vcad::IdentityMatcher {
public:
    explicit CountingMatcher(double threshold) : inner_(threshold) {}
    std::optional<TrackId> match(const FaceObservation& q, std::span<const Track* const> c) override {
        ++calls;
        return inner_.match(q, c);
    }
    int calls = 0;

private:
    vcad::EmbeddingMatcher inner_;
};

std::vector<double> identity_embedding(std::size_t who, double noise, std::mt19937_64& rng) {
    std::vector<double> e(vcad::kEmbeddingSize, 0.0);
    e[who * 7 % vcad::kEmbeddingSize] = 1.0;
    std::normal_distribution<double> g(0.0, noise);
    for (auto& v : e) {
        v += g(rng);
    }
    return e;
}

BoundingBox cell(int row, int col, double size = 100.0, double x0 = 0.0) {
    return {x0 + col * size * 1.5, row * size * 1.5, x0 + col * size * 1.5 + size, row * size * 1.5 + size};
}

FaceObservation face(std::int64_t frame, BoundingBox box, std::vector<double> embedding = {}) {
    FaceObservation f;
    f.frame_index = frame;
    f.box = box;
    f.embedding = std::move(embedding);
    return f;
}

}  // namespace

TEST_SUITE("tracking") {

TEST_CASE("static grid extends tracks without calling the matcher") {
    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    std::mt19937_64 rng(1);
    for (std::int64_t frame = 0; frame < 50; ++frame) {
        std::vector<FaceObservation> faces;
        for (int i = 0; i < 4; ++i) {
            faces.push_back(face(frame, cell(i / 2, i % 2), identity_embedding(i, 0.01, rng)));
        }
        tracker.associate_frame(faces, matcher);
    }
    CHECK(matcher.calls == 0);
    REQUIRE(tracker.participant_count() == 4);
    for (const auto& t : tracker.tracks()) {
        CHECK(t.observations.size() == 50);
        for (const auto& o : t.observations) {
            CHECK(o.box == t.observations.front().box);
        }
    }
}

TEST_CASE("empty frame leaves tracks unchanged") {
    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    tracker.associate_frame(std::vector{face(0, cell(0, 0))}, matcher);
    const auto before = tracker.tracks();
    tracker.associate_frame(std::span<const FaceObservation>{}, matcher);
    REQUIRE(tracker.tracks().size() == before.size());
    CHECK(tracker.tracks()[0].observations.size() == before[0].observations.size());
    CHECK(matcher.calls == 0);
}

TEST_CASE("grid reshuffle reattaches faces by embedding") {
    std::mt19937_64 rng(7);
    constexpr int kPeople = 4;
    std::vector<std::vector<double>> base;
    for (int i = 0; i < kPeople; ++i) {
        base.push_back(identity_embedding(i, 0.0, rng));
    }
    auto noisy = [&](int who) {
        auto e = base[who];
        std::normal_distribution<double> g(0.0, 0.005);
        for (auto& v : e) v += g(rng);
        return e;
    };
    // Oracle: the inter-identity distance dwarfs the noise, so exhaustive
    // nearest neighbour recovers the identity.
    for (int i = 0; i < kPeople; ++i) {
        for (int j = 0; j < kPeople; ++j) {
            if (i != j) {
                CHECK(vcad::kernels::distance(base[i], base[j]) > 1.0);
            }
        }
    }

    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    std::vector<FaceObservation> first;
    for (int i = 0; i < kPeople; ++i) {
        first.push_back(face(0, cell(i / 2, i % 2), noisy(i)));
    }
    tracker.associate_frame(first, matcher);
    REQUIRE(tracker.participant_count() == kPeople);

    // New layout: a single row far from the old cells, people permuted.
    const int perm[kPeople] = {2, 0, 3, 1};
    std::vector<FaceObservation> second;
    for (int slot = 0; slot < kPeople; ++slot) {
        second.push_back(face(1, cell(3, slot, 100.0, 37.0), noisy(perm[slot])));
    }
    for (const auto& f : second) {
        for (const auto& t : tracker.tracks()) {
            CHECK(vcad::iou(f.box, t.last().box) < 0.5);
        }
    }
    tracker.associate_frame(second, matcher);
    CHECK(matcher.calls == kPeople);
    REQUIRE(tracker.participant_count() == kPeople);
    for (int slot = 0; slot < kPeople; ++slot) {
        const auto& t = tracker.tracks()[perm[slot]];
        REQUIRE(t.observations.size() == 2);
        CHECK(t.last().box == second[slot].box);
    }
}

TEST_CASE("matcher rejection opens a new participant") {
    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    std::mt19937_64 rng(2);
    tracker.associate_frame(std::vector{face(0, cell(0, 0), identity_embedding(0, 0.0, rng))}, matcher);
    // Moved far away and looks like someone else.
    tracker.associate_frame(std::vector{face(1, cell(2, 2), identity_embedding(1, 0.0, rng))}, matcher);
    CHECK(matcher.calls == 1);
    CHECK(tracker.participant_count() == 2);
    CHECK(tracker.tracks()[1].id == 1);
}

TEST_CASE("ids stay with their participant and tracks never merge") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr int kPeople = 6;
    std::vector<std::vector<double>> base;
    for (int i = 0; i < kPeople; ++i) {
        base.push_back(identity_embedding(i, 0.0, rng));
    }
    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    std::map<TrackId, int> owner;
    std::size_t last_count = 0;
    std::vector<int> slots{0, 1, 2, 3, 4, 5};
    double x0 = 0.0;
    for (std::int64_t frame = 0; frame < 200; ++frame) {
        if (u(rng) < 0.05) {
            // The tiles move when the layout changes: IOU with the old cells is 0.25.
            std::shuffle(slots.begin(), slots.end(), rng);
            x0 = 60.0 - x0;
        }
        std::vector<FaceObservation> faces;
        std::vector<int> who;
        for (int p = 0; p < kPeople; ++p) {
            if (u(rng) < 0.03) {
                continue;  // briefly undetected
            }
            auto e = base[p];
            std::normal_distribution<double> g(0.0, 0.01);
            for (auto& v : e) v += g(rng);
            faces.push_back(face(frame, cell(slots[p] / 3, slots[p] % 3, 100.0, x0), e));
            who.push_back(p);
        }
        tracker.associate_frame(faces, matcher);
        CHECK(tracker.participant_count() >= last_count);
        last_count = tracker.participant_count();
        for (const auto& t : tracker.tracks()) {
            if (t.last().frame_index != frame) continue;
            for (std::size_t f = 0; f < faces.size(); ++f) {
                if (faces[f].box == t.last().box) {
                    auto [it, inserted] = owner.emplace(t.id, who[f]);
                    CHECK(it->second == who[f]);
                }
            }
        }
    }
    for (const auto& t : tracker.tracks()) {
        for (std::size_t i = 1; i < t.observations.size(); ++i) {
            CHECK(t.observations[i].frame_index > t.observations[i - 1].frame_index);
        }
    }
}

TEST_CASE("mixed or repeated frame indices are rejected") {
    vcad::Tracker tracker;
    CountingMatcher matcher(0.6);
    CHECK_THROWS_AS(tracker.associate_frame(std::vector{face(0, cell(0, 0)), face(1, cell(0, 1))}, matcher),
                    vcad::ValidationError);
    tracker.associate_frame(std::vector{face(3, cell(0, 0))}, matcher);
    CHECK_THROWS_AS(tracker.associate_frame(std::vector{face(3, cell(0, 0))}, matcher), vcad::ValidationError);
    CHECK_THROWS_AS(tracker.associate_frame(std::vector{face(2, cell(0, 0))}, matcher), vcad::ValidationError);
}

TEST_CASE("stale tracks leave the active set") {
    vcad::TrackingConfig cfg;
    cfg.staleness_horizon = 3;
    vcad::Tracker tracker(cfg);
    CountingMatcher matcher(0.6);
    std::mt19937_64 rng(8);
    const auto e0 = identity_embedding(0, 0.0, rng);
    const auto e1 = identity_embedding(1, 0.0, rng);
    tracker.associate_frame(std::vector{face(0, cell(0, 0), e0), face(0, cell(0, 1), e1)}, matcher);
    for (std::int64_t f = 1; f <= 4; ++f) {
        tracker.associate_frame(std::vector{face(f, cell(0, 0), e0)}, matcher);
        CHECK(tracker.participant_count() == 2);
    }
    const auto active = tracker.active_indices();
    REQUIRE(active.size() == 1);
    CHECK(tracker.tracks()[active[0]].id == 0);
}

TEST_CASE("embedding matcher") {
    std::mt19937_64 rng(4);
    Track t0{0, {face(0, cell(0, 0), std::vector<double>(vcad::kEmbeddingSize, 0.0))}};
    auto e1 = std::vector<double>(vcad::kEmbeddingSize, 0.0);
    e1[0] = 0.8;
    Track t1{1, {face(0, cell(0, 1), e1)}};
    const Track* cands[] = {&t0, &t1};
    vcad::EmbeddingMatcher m(0.6);

    SUBCASE("exact copy matches") {
        CHECK(m.match(face(1, cell(0, 0), t1.last().embedding), cands) == TrackId{1});
    }
    SUBCASE("nearer of two candidates inside the threshold") {
        auto q = std::vector<double>(vcad::kEmbeddingSize, 0.0);
        q[0] = 0.3;  // 0.3 from t0, 0.5 from t1
        CHECK(m.match(face(1, cell(0, 0), q), cands) == TrackId{0});
    }
    SUBCASE("everything too far") {
        auto q = std::vector<double>(vcad::kEmbeddingSize, 0.0);
        q[5] = 1.0;
        CHECK_FALSE(m.match(face(1, cell(0, 0), q), cands).has_value());
    }
    SUBCASE("query without embedding") {
        CHECK_FALSE(m.match(face(1, cell(0, 0)), cands).has_value());
    }
    CHECK_THROWS(vcad::EmbeddingMatcher(0.0));
}

TEST_CASE("expression names round-trip") {
    for (std::size_t i = 0; i < vcad::kExpressionCount; ++i) {
        const auto e = static_cast<vcad::Expression>(i);
        CHECK(vcad::parse_expression(vcad::to_string(e)) == e);
    }
    CHECK_FALSE(vcad::parse_expression("Boredom").has_value());
}

}  // TEST_SUITE
