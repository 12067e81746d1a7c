#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vcad/errors.hpp"
#include "vcad/forecast.hpp"

using vcad::ArimaModel;
using vcad::ArimaOrder;

TEST_SUITE("forecast") {

TEST_CASE("differencing by hand") {
    const std::vector<double> x{1, 3, 6, 10};
    CHECK(vcad::difference(x, 0) == x);
    CHECK(vcad::difference(x, 1) == std::vector<double>{2, 3, 4});
    CHECK(vcad::difference(x, 2) == std::vector<double>{1, 1});
}

TEST_CASE("difference then integrate reconstructs the series") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int d = 0; d <= 3; ++d) {
        std::vector<double> x(25);
        for (auto& v : x) v = u(rng);
        const auto diff = vcad::difference_with_heads(x, d);
        CHECK(diff.values.size() == x.size() - d);
        const auto back = vcad::integrate(diff);
        REQUIRE(back.size() == x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("order usability") {
    CHECK(ArimaOrder{2, 0, 2}.usable());
    CHECK(ArimaOrder{0, 1, 0}.usable());
    CHECK_FALSE(ArimaOrder{0, 0, 0}.usable());
    CHECK_FALSE(ArimaOrder{6, 0, 0}.usable());
    CHECK_FALSE(ArimaOrder{-1, 0, 1}.usable());
    CHECK(vcad::kDefaultArimaOrder == ArimaOrder{2, 0, 2});
}

TEST_CASE("root checks") {
    CHECK(vcad::is_stationary(std::vector<double>{0.5, -0.3}));
    CHECK_FALSE(vcad::is_stationary(std::vector<double>{1.0}));
    CHECK_FALSE(vcad::is_stationary(std::vector<double>{0.6, 0.5}));
    CHECK(vcad::is_invertible(std::vector<double>{0.6}));
    CHECK_FALSE(vcad::is_invertible(std::vector<double>{-1.2}));
    CHECK(vcad::is_stationary(std::vector<double>{}));
}

TEST_CASE("constant series fits the constant") {
    const std::vector<double> x(40, 3.25);
    const auto m = vcad::fit(x, {1, 0, 0});
    REQUIRE(m.ar.size() == 1);
    CHECK(m.ar[0] == doctest::Approx(0.0));
    CHECK(m.intercept == doctest::Approx(3.25));
    CHECK(m.residual_variance == doctest::Approx(0.0));
    CHECK(vcad::forecast_one(m, x) == doctest::Approx(3.25));
}

TEST_CASE("too-short series and unusable orders are rejected") {
    const std::vector<double> x(8, 1.0);
    CHECK_THROWS_AS(vcad::fit(x, {2, 0, 2}), vcad::EstimationError);
    const std::vector<double> y(40, 1.0);
    CHECK_THROWS_AS(vcad::fit(y, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("AR(2) and MA(1) recovery") {
    const auto ar = oracle::arma(500, {0.5, -0.3}, {}, 1.0, 101);
    const auto m_ar = vcad::fit(ar, {2, 0, 0});
    CHECK(std::abs(m_ar.ar[0] - 0.5) <= 0.15);
    CHECK(std::abs(m_ar.ar[1] + 0.3) <= 0.15);
    CHECK(m_ar.residual_variance == doctest::Approx(1.0).epsilon(0.2));

    const auto ma = oracle::arma(500, {}, {0.6}, 1.0, 202);
    const auto m_ma = vcad::fit(ma, {0, 0, 1});
    CHECK(std::abs(m_ma.ma[0] - 0.6) <= 0.15);
    CHECK_FALSE(m_ma.degraded);
}

TEST_CASE("fit is deterministic") {
    const auto x = oracle::arma(120, {0.4}, {0.3}, 1.0, 9);
    const auto a = vcad::fit(x, {2, 0, 2});
    const auto b = vcad::fit(x, {2, 0, 2});
    CHECK(a.ar == b.ar);
    CHECK(a.ma == b.ma);
    CHECK(a.intercept == b.intercept);
    CHECK(a.residual_variance == b.residual_variance);
}

TEST_CASE("fitted models are stationary and invertible") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(20);
        // Adversarial short windows: trends, spikes, near-constants.
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = (trial % 3 == 0 ? 0.3 * i : 0.0) + u(rng) + (i == 17 && trial % 2 ? 20.0 : 0.0);
        }
        const auto m = vcad::fit(x, {2, 0, 2});
        CHECK(vcad::is_stationary(m.ar));
        CHECK(vcad::is_invertible(m.ma));
        CHECK(m.residual_variance >= 0.0);
        CHECK(std::isfinite(vcad::forecast_one(m, x)));
    }
}

TEST_CASE("closed-form forecasts") {
    ArimaModel intercept_only;
    intercept_only.order = {0, 0, 0};
    intercept_only.intercept = 4.5;
    CHECK(vcad::forecast_one(intercept_only, std::vector<double>{1, 2, 3}) == 4.5);

    ArimaModel ar1;
    ar1.order = {1, 0, 0};
    ar1.ar = {0.7};
    CHECK(vcad::forecast_one(ar1, std::vector<double>{5, -1, 2}) == doctest::Approx(1.4));

    // d = 1: forecast of the level adds the predicted difference to the last value.
    ArimaModel rw;
    rw.order = {1, 1, 0};
    rw.ar = {0.5};
    CHECK(vcad::forecast_one(rw, std::vector<double>{1, 3, 7}) == doctest::Approx(7 + 0.5 * 4));
}

TEST_CASE("level shift passes through differenced models") {
    const auto base = oracle::arma(80, {0.4}, {0.2}, 1.0, 44);
    std::vector<double> walk(base.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        acc += base[i];
        walk[i] = acc;
    }
    for (const ArimaOrder order : {ArimaOrder{1, 1, 1}, ArimaOrder{2, 1, 0}, ArimaOrder{0, 2, 1}}) {
        std::vector<double> shifted = walk;
        for (auto& v : shifted) v += 10.0;
        const double f0 = vcad::forecast_one(vcad::fit(walk, order), walk);
        const double f1 = vcad::forecast_one(vcad::fit(shifted, order), shifted);
        CHECK(std::abs((f1 - f0) - 10.0) <= 1e-6);
    }
}

TEST_CASE("auto order on white noise and a random walk") {
    const auto noise = oracle::arma(300, {}, {}, 1.0, 5);
    CHECK(vcad::select_differencing(noise, 1) == 0);
    const auto chosen = vcad::auto_order(noise);
    CHECK(chosen.d == 0);
    CHECK(chosen.p <= 1);
    CHECK(chosen.q <= 1);

    std::vector<double> walk(noise.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        acc += noise[i];
        walk[i] = acc;
    }
    CHECK(vcad::select_differencing(walk, 1) == 1);
    CHECK(vcad::auto_order(walk).d == 1);
}

TEST_CASE("selected order has the smallest AIC on the grid") {
    const auto x = oracle::arma(200, {0.6, -0.2}, {0.3}, 1.0, 77);
    const auto scores = vcad::score_orders(x);
    REQUIRE_FALSE(scores.empty());
    const auto chosen = vcad::auto_order(x);
    double chosen_aic = 0.0;
    bool found = false;
    for (const auto& s : scores) {
        if (s.order == chosen) {
            chosen_aic = s.aic;
            found = true;
        }
    }
    REQUIRE(found);
    for (const auto& s : scores) {
        CHECK(chosen_aic <= s.aic);
    }
}

TEST_CASE("auto order rejects short series") {
    const std::vector<double> x(29, 1.0);
    CHECK_THROWS_AS(vcad::auto_order(x), vcad::EstimationError);
}

TEST_CASE("auto order falls back to AR(1) when nothing fits") {
    const std::vector<double> x(40, 2.0);
    CHECK(vcad::score_orders(x).empty());
    CHECK(vcad::auto_order(x) == ArimaOrder{1, 0, 0});
}

}  // TEST_SUITE
