#include "vcad/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "least_squares.hpp"
#include "vcad/errors.hpp"

namespace vcad {

namespace {

constexpr int kCssMaxSweeps = 200;
constexpr double kCssStepTolerance = 1e-8;
constexpr double kShrink = 0.9;

double mean_of(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const double m = mean_of(v);
    double s = 0.0;
    for (const double x : v) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(v.size());
}

// Scales coefficient i by kShrink^(i+1), which pushes every root outward by 1/kShrink.
void damp(std::vector<double>& coeffs) {
    double f = 1.0;
    for (double& c : coeffs) {
        f *= kShrink;
        c *= f;
    }
}

// Parameters of the normalised problem: [c, ar..., ma...].
struct Params {
    std::size_t p = 0;
    std::size_t q = 0;
    std::vector<double> theta;

    [[nodiscard]] double c() const { return theta[0]; }
    [[nodiscard]] std::span<const double> ar() const { return {theta.data() + 1, p}; }
    [[nodiscard]] std::span<const double> ma() const { return {theta.data() + 1 + p, q}; }
};

// Residual recursion conditioned on zero errors before index p.
double css(const Params& prm, std::span<const double> u, std::size_t sum_from,
           std::vector<double>* residuals = nullptr) {
    const std::size_t m = u.size();
    thread_local std::vector<double> scratch;
    std::vector<double>& e = residuals != nullptr ? *residuals : scratch;
    e.assign(m, 0.0);
    double s = 0.0;
    const auto ar = prm.ar();
    const auto ma = prm.ma();
    for (std::size_t t = prm.p; t < m; ++t) {
        double pred = prm.c();
        for (std::size_t i = 0; i < prm.p; ++i) {
            pred += ar[i] * u[t - 1 - i];
        }
        for (std::size_t j = 0; j < prm.q && j + 1 <= t; ++j) {
            pred += ma[j] * e[t - 1 - j];
        }
        e[t] = u[t] - pred;
        if (t >= sum_from) {
            s += e[t] * e[t];
        }
    }
    return s;
}

void make_feasible(Params& prm) {
    std::vector<double> ar(prm.ar().begin(), prm.ar().end());
    std::vector<double> ma(prm.ma().begin(), prm.ma().end());
    while (!is_stationary(ar)) {
        damp(ar);
    }
    while (!is_invertible(ma)) {
        damp(ma);
    }
    std::copy(ar.begin(), ar.end(), prm.theta.begin() + 1);
    std::copy(ma.begin(), ma.end(), prm.theta.begin() + 1 + static_cast<std::ptrdiff_t>(prm.p));
}

void refine_css(Params& prm, std::span<const double> u) {
    const std::size_t n = prm.theta.size();
    std::vector<double> step(n, 0.1);
    double best = css(prm, u, prm.p);
    for (int sweep = 0; sweep < kCssMaxSweeps; ++sweep) {
        for (std::size_t k = 0; k < n; ++k) {
            bool moved = false;
            const double keep = prm.theta[k];
            for (const double sign : {1.0, -1.0}) {
                prm.theta[k] = keep + sign * step[k];
                // Only the polynomial holding coefficient k can have left the feasible set.
                const bool ok = k == 0 || (k <= prm.p ? is_stationary(prm.ar()) : is_invertible(prm.ma()));
                if (!ok) {
                    continue;
                }
                const double s = css(prm, u, prm.p);
                if (s < best) {
                    best = s;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                prm.theta[k] = keep;
            }
            step[k] = moved ? std::min(step[k] * 2.0, 1.0) : step[k] * 0.5;
        }
        if (*std::max_element(step.begin(), step.end()) < kCssStepTolerance) {
            break;
        }
    }
}

// Hannan-Rissanen start on the normalised series. Returns nothing when the
// regressions are singular.
std::optional<Params> hannan_rissanen(std::span<const double> u, std::size_t p, std::size_t q) {
    const std::size_t m = u.size();
    Params prm{p, q, std::vector<double>(1 + p + q, 0.0)};

    std::vector<double> proxy(m, 0.0);
    std::size_t long_order = 0;
    if (q > 0) {
        const auto log_m = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(m))));
        long_order = std::max(p, q) + log_m;
        // Shrink the long AR until both regressions are over-determined.
        while (long_order > 1) {
            const std::size_t rows1 = m - std::min(m, long_order);
            const std::size_t start2 = std::max(p, long_order + q);
            const std::size_t rows2 = m > start2 ? m - start2 : 0;
            if (rows1 > long_order + 1 && rows2 > 1 + p + q) {
                break;
            }
            --long_order;
        }
        if (m <= long_order + 2) {
            return std::nullopt;
        }
        detail::Design x{m - long_order, long_order + 1, {}};
        x.values.assign(x.rows * x.cols, 0.0);
        std::vector<double> y(x.rows);
        for (std::size_t t = long_order; t < m; ++t) {
            const std::size_t r = t - long_order;
            x.at(r, 0) = 1.0;
            for (std::size_t i = 0; i < long_order; ++i) {
                x.at(r, i + 1) = u[t - 1 - i];
            }
            y[r] = u[t];
        }
        const auto b = detail::least_squares(x, y);
        if (!b) {
            return std::nullopt;
        }
        for (std::size_t t = long_order; t < m; ++t) {
            double pred = (*b)[0];
            for (std::size_t i = 0; i < long_order; ++i) {
                pred += (*b)[i + 1] * u[t - 1 - i];
            }
            proxy[t] = u[t] - pred;
        }
    }

    const std::size_t start = q > 0 ? std::max(p, long_order + q) : p;
    if (m <= start + 1 + p + q) {
        return std::nullopt;
    }
    detail::Design x{m - start, 1 + p + q, {}};
    x.values.assign(x.rows * x.cols, 0.0);
    std::vector<double> y(x.rows);
    for (std::size_t t = start; t < m; ++t) {
        const std::size_t r = t - start;
        x.at(r, 0) = 1.0;
        for (std::size_t i = 0; i < p; ++i) {
            x.at(r, 1 + i) = u[t - 1 - i];
        }
        for (std::size_t j = 0; j < q; ++j) {
            x.at(r, 1 + p + j) = proxy[t - 1 - j];
        }
        y[r] = u[t];
    }
    auto b = detail::least_squares(x, y);
    if (!b) {
        return std::nullopt;
    }
    prm.theta = std::move(*b);
    return prm;
}

ArimaModel intercept_only(ArimaOrder order, std::span<const double> z, bool degraded) {
    ArimaModel model;
    model.order = order;
    model.ar.assign(static_cast<std::size_t>(order.p), 0.0);
    model.ma.assign(static_cast<std::size_t>(order.q), 0.0);
    model.intercept = mean_of(z);
    model.residual_variance = variance_of(z);
    model.degraded = degraded;
    return model;
}

// Last value of every differencing level 0..d-1 of the history.
std::vector<double> level_tails(std::span<const double> history, int d) {
    std::vector<double> tails;
    std::vector<double> level(history.begin(), history.end());
    for (int k = 0; k < d; ++k) {
        tails.push_back(level.back());
        level = difference(level, 1);
    }
    return tails;
}

}  // namespace

bool ArimaOrder::usable() const noexcept {
    const auto in_range = [](int v) { return v >= 0 && v <= kMax; };
    if (!in_range(p) || !in_range(d) || !in_range(q)) {
        return false;
    }
    return d > 0 || p + q >= 1;
}

std::vector<double> difference(std::span<const double> series, int d) {
    if (d < 0 || series.size() <= static_cast<std::size_t>(d)) {
        throw std::invalid_argument("difference: series length must exceed d");
    }
    std::vector<double> out(series.begin(), series.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

Differenced difference_with_heads(std::span<const double> series, int d) {
    if (d < 0 || series.size() <= static_cast<std::size_t>(d)) {
        throw std::invalid_argument("difference: series length must exceed d");
    }
    Differenced out;
    std::vector<double> level(series.begin(), series.end());
    for (int k = 0; k < d; ++k) {
        out.heads.push_back(level.front());
        level = difference(level, 1);
    }
    out.values = std::move(level);
    return out;
}

std::vector<double> integrate(const Differenced& diff) {
    std::vector<double> level = diff.values;
    for (std::size_t k = diff.heads.size(); k-- > 0;) {
        std::vector<double> up;
        up.reserve(level.size() + 1);
        up.push_back(diff.heads[k]);
        for (const double v : level) {
            up.push_back(up.back() + v);
        }
        level = std::move(up);
    }
    return level;
}

namespace {

// Step-down recursion on sign*coeffs: stationary iff every partial
// autocorrelation is inside (-1, 1).
bool step_down(std::span<const double> coeffs, double sign) {
    constexpr std::size_t kInline = 16;
    std::array<double, kInline> buf_a{};
    std::array<double, kInline> buf_b{};
    std::vector<double> heap_a;
    std::vector<double> heap_b;
    double* a = buf_a.data();
    double* next = buf_b.data();
    if (coeffs.size() > kInline) {
        heap_a.resize(coeffs.size());
        heap_b.resize(coeffs.size());
        a = heap_a.data();
        next = heap_b.data();
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        a[i] = sign * coeffs[i];
    }
    for (std::size_t k = coeffs.size(); k > 0; --k) {
        const double kappa = a[k - 1];
        if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) {
            return false;
        }
        const double denom = 1.0 - kappa * kappa;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            next[i] = (a[i] + kappa * a[k - 2 - i]) / denom;
        }
        std::swap(a, next);
    }
    return true;
}

}  // namespace

bool is_stationary(std::span<const double> ar) { return step_down(ar, 1.0); }

bool is_invertible(std::span<const double> ma) { return step_down(ma, -1.0); }

ArimaModel fit(std::span<const double> series, ArimaOrder order) {
    if (!order.usable()) {
        throw std::invalid_argument("fit: ARIMA order (" + std::to_string(order.p) + "," +
                                    std::to_string(order.d) + "," + std::to_string(order.q) +
                                    ") is not usable");
    }
    const auto p = static_cast<std::size_t>(order.p);
    const auto q = static_cast<std::size_t>(order.q);
    const auto need = p + q + static_cast<std::size_t>(order.d) + 5;
    if (series.size() < need) {
        throw EstimationError("fit: " + std::to_string(series.size()) +
                              " samples, at least " + std::to_string(need) + " required");
    }
    const auto z = difference(series, order.d);
    const double mu = mean_of(z);
    const double sd = std::sqrt(variance_of(z));
    const double scale = std::max(std::abs(mu), 1.0);
    if (p + q == 0) {
        return intercept_only(order, z, false);
    }
    if (!(sd > 1e-12 * scale)) {
        return intercept_only(order, z, true);
    }

    std::vector<double> u(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        u[i] = (z[i] - mu) / sd;
    }
    auto start = hannan_rissanen(u, p, q);
    if (!start) {
        return intercept_only(order, z, true);
    }
    Params prm = std::move(*start);
    make_feasible(prm);
    refine_css(prm, u);

    const double s = css(prm, u, p);
    ArimaModel model;
    model.order = order;
    model.ar.assign(prm.ar().begin(), prm.ar().end());
    model.ma.assign(prm.ma().begin(), prm.ma().end());
    const double ar_sum = std::accumulate(model.ar.begin(), model.ar.end(), 0.0);
    model.intercept = mu * (1.0 - ar_sum) + sd * prm.c();
    model.residual_variance = sd * sd * s / static_cast<double>(u.size() - p);
    return model;
}

double conditional_sum_of_squares(const ArimaModel& model, std::span<const double> series,
                                  std::size_t sum_from) {
    const auto z = difference(series, model.order.d);
    Params prm{model.ar.size(), model.ma.size(), {}};
    prm.theta.push_back(model.intercept);
    prm.theta.insert(prm.theta.end(), model.ar.begin(), model.ar.end());
    prm.theta.insert(prm.theta.end(), model.ma.begin(), model.ma.end());
    return css(prm, z, std::max(prm.p, sum_from));
}

double forecast_one(const ArimaModel& model, std::span<const double> history) {
    const std::size_t p = model.ar.size();
    const std::size_t q = model.ma.size();
    const auto d = model.order.d;
    if (history.size() < p + q + static_cast<std::size_t>(d) || history.size() <= static_cast<std::size_t>(d)) {
        throw std::invalid_argument("forecast_one: history too short for the model order");
    }
    const auto z = difference(history, d);
    Params prm{p, q, {}};
    prm.theta.push_back(model.intercept);
    prm.theta.insert(prm.theta.end(), model.ar.begin(), model.ar.end());
    prm.theta.insert(prm.theta.end(), model.ma.begin(), model.ma.end());
    std::vector<double> e;
    css(prm, z, z.size(), &e);

    const std::size_t m = z.size();
    double next = model.intercept;
    for (std::size_t i = 0; i < p && i < m; ++i) {
        next += model.ar[i] * z[m - 1 - i];
    }
    for (std::size_t j = 0; j < q && j < m; ++j) {
        next += model.ma[j] * e[m - 1 - j];
    }
    const auto tails = level_tails(history, d);
    for (std::size_t k = tails.size(); k-- > 0;) {
        next += tails[k];
    }
    return next;
}

int select_differencing(std::span<const double> series, int d_max, double variance_ratio) {
    std::vector<double> level(series.begin(), series.end());
    int d = 0;
    while (d < d_max && level.size() > 2) {
        const double v_level = variance_of(level);
        if (!(v_level > 0.0)) {
            break;
        }
        auto next = difference(level, 1);
        if (variance_of(next) / v_level >= variance_ratio) {
            break;
        }
        level = std::move(next);
        ++d;
    }
    return d;
}

std::vector<OrderScore> score_orders(std::span<const double> series, const AutoOrderOptions& options) {
    if (series.size() < 30) {
        throw EstimationError("auto_order: at least 30 samples required, got " +
                              std::to_string(series.size()));
    }
    const int d = select_differencing(series, options.d_max, options.variance_ratio);
    const auto common_start = static_cast<std::size_t>(std::max(options.p_max, 0));
    std::vector<OrderScore> scores;
    for (int p = 0; p <= options.p_max; ++p) {
        for (int q = 0; q <= options.q_max; ++q) {
            const ArimaOrder order{p, d, q};
            if (!order.usable()) {
                continue;
            }
            try {
                const auto model = fit(series, order);
                if (model.degraded && p + q > 0) {
                    continue;
                }
                const double n = static_cast<double>(series.size() - static_cast<std::size_t>(d) - common_start);
                const double s = conditional_sum_of_squares(model, series, common_start);
                const double aic = n * std::log(std::max(s / n, std::numeric_limits<double>::min())) +
                                   2.0 * static_cast<double>(p + q + 1);
                scores.push_back({order, aic});
            } catch (const EstimationError&) {
            }
        }
    }
    return scores;
}

ArimaOrder auto_order(std::span<const double> series, const AutoOrderOptions& options) {
    const auto scores = score_orders(series, options);
    if (scores.empty()) {
        return ArimaOrder{1, 0, 0};
    }
    // First minimum in grid order (p, then q) keeps the choice deterministic.
    const auto best = std::min_element(scores.begin(), scores.end(),
                                       [](const OrderScore& l, const OrderScore& r) { return l.aic < r.aic; });
    return best->order;
}

}  // namespace vcad
