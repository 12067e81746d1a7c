#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "vcad/features.hpp"

using vcad::Expression;
using vcad::FaceObservation;
using vcad::FeatureSource;
using vcad::Track;

namespace {

FaceObservation obs(std::int64_t frame, std::vector<double> expression, std::vector<double> embedding = {}) {
    FaceObservation o;
    o.frame_index = frame;
    o.box = {0, 0, 10, 10};
    o.expression = std::move(expression);
    o.embedding = std::move(embedding);
    return o;
}

std::vector<double> one_hot(Expression e) {
    std::vector<double> v(vcad::kExpressionCount, 0.0);
    v[static_cast<std::size_t>(e)] = 1.0;
    return v;
}

// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
std::vector<std::vector<double>> random_rotation(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : q[i]) v = g(rng);
        for (std::size_t j = 0; j < i; ++j) {
            const double dot = std::inner_product(q[i].begin(), q[i].end(), q[j].begin(), 0.0);
            for (std::size_t k = 0; k < n; ++k) q[i][k] -= dot * q[j][k];
        }
        const double norm = std::sqrt(std::inner_product(q[i].begin(), q[i].end(), q[i].begin(), 0.0));
        for (auto& v : q[i]) v /= norm;
    }
    return q;
}

std::vector<double> apply(const std::vector<std::vector<double>>& m, const std::vector<double>& x) {
    std::vector<double> y(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        y[i] = std::inner_product(m[i].begin(), m[i].end(), x.begin(), 0.0);
    }
    return y;
}

Track random_track(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Track t{3, {}};
    for (std::size_t f = 0; f < n; ++f) {
        std::vector<double> e(vcad::kExpressionCount);
        for (auto& v : e) v = u(rng);
        const double s = std::accumulate(e.begin(), e.end(), 0.0);
        for (auto& v : e) v /= s;
        std::vector<double> emb(vcad::kEmbeddingSize);
        for (auto& v : emb) v = u(rng) - 0.5;
        t.observations.push_back(obs(static_cast<std::int64_t>(f), e, emb));
    }
    return t;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("hand-computed expression changes") {
    const auto neutral = one_hot(Expression::Neutral);
    Track t{0, {obs(0, neutral), obs(1, neutral), obs(2, one_hot(Expression::Surprise)),
                obs(3, neutral), obs(4, {0, 0, 0, 0.1, 0, 0, 0.9})}};
    const auto s = vcad::change_series(t, FeatureSource::Expression7);
    REQUIRE(s.samples.size() == 4);
    CHECK(s.samples[0].frame_index == 1);
    CHECK(s.samples[0].value == 0.0);
    CHECK(s.samples[1].value == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.samples[1].frame_index == 2);
    CHECK(s.samples[3].value == doctest::Approx(std::sqrt(0.02)));
    CHECK(s.samples[3].value == doctest::Approx(0.141).epsilon(0.01));
}

TEST_CASE("gaps are spanned") {
    const auto neutral = one_hot(Expression::Neutral);
    Track t{0, {obs(0, neutral), obs(1, {}), obs(5, one_hot(Expression::Fear))}};
    const auto s = vcad::change_series(t, FeatureSource::Expression7);
    REQUIRE(s.samples.size() == 1);
    CHECK(s.samples[0].frame_index == 5);
    CHECK(s.samples[0].value == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("fewer than two usable observations give an empty series") {
    Track t{0, {obs(0, one_hot(Expression::Anger))}};
    CHECK(vcad::change_series(t, FeatureSource::Expression7).empty());
    CHECK(vcad::change_series(t, FeatureSource::Embedding128).empty());
}

TEST_CASE("change is invariant under rotation and scales linearly") {
    std::mt19937_64 rng(17);
    const auto track = random_track(rng, 40);
    const auto rot = random_rotation(vcad::kEmbeddingSize, rng);
    Track rotated = track;
    Track scaled = track;
    for (std::size_t i = 0; i < track.observations.size(); ++i) {
        rotated.observations[i].embedding = apply(rot, track.observations[i].embedding);
        for (auto& v : scaled.observations[i].embedding) v *= 2.5;
    }
    const auto base = vcad::change_series(track, FeatureSource::Embedding128).values();
    const auto r = vcad::change_series(rotated, FeatureSource::Embedding128).values();
    const auto c = vcad::change_series(scaled, FeatureSource::Embedding128).values();
    REQUIRE(base.size() == 39);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(r[i] == doctest::Approx(base[i]).epsilon(1e-10));
        CHECK(c[i] == doctest::Approx(2.5 * base[i]).epsilon(1e-12));
        CHECK(base[i] >= 0.0);
    }
}

TEST_CASE("labels: stored label wins, argmax otherwise") {
    auto stored = obs(1, one_hot(Expression::Neutral));
    stored.expression_label = Expression::Surprise;
    Track t{0, {obs(0, one_hot(Expression::Neutral)), stored, obs(2, {})}};
    const auto l = vcad::label_series(t);
    REQUIRE(l.samples.size() == 2);
    CHECK(l.samples[0].label == Expression::Neutral);
    CHECK(l.samples[1].label == Expression::Surprise);
}

TEST_CASE("argmax ties go to the earlier category") {
    CHECK(vcad::dominant_expression({0.5, 0, 0, 0, 0, 0, 0.5}) == Expression::Happiness);
    // Exhaustive over pairs of tied positions.
    for (std::size_t i = 0; i < vcad::kExpressionCount; ++i) {
        for (std::size_t j = i + 1; j < vcad::kExpressionCount; ++j) {
            std::vector<double> v(vcad::kExpressionCount, 0.0);
            v[i] = v[j] = 0.5;
            CHECK(vcad::dominant_expression(v) == static_cast<Expression>(i));
        }
    }
}

TEST_CASE("argmax labels ignore positive rescaling") {
    std::mt19937_64 rng(23);
    const auto track = random_track(rng, 30);
    Track scaled = track;
    for (auto& o : scaled.observations) {
        for (auto& v : o.expression) v *= 7.0;
    }
    const auto a = vcad::label_series(track);
    const auto b = vcad::label_series(scaled);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].label == b.samples[i].label);
    }
}

}  // TEST_SUITE
