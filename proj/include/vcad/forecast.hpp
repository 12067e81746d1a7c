#pragma once

// ARIMA(p, d, q) estimation and one-step forecasting for short windows.
//
// Model on the d-times differenced series z:
//   z_t = c + sum_i ar[i] z_{t-1-i} + e_t + sum_j ma[j] e_{t-1-j}
// Estimation is Hannan-Rissanen (long-AR residual proxy, then least squares
// on lagged values and proxy residuals) followed by a conditional sum of
// squares refinement with derivative-free coordinate descent. Everything is
// deterministic.

#include <span>
#include <vector>

namespace vcad {

struct ArimaOrder {
    int p = 2;
    int d = 0;
    int q = 2;

    static constexpr int kMax = 5;

    /// Bounds check plus the usable-model rule (p + q ≥ 1 when d = 0).
    [[nodiscard]] bool usable() const noexcept;

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

inline constexpr ArimaOrder kDefaultArimaOrder{2, 0, 2};

struct ArimaModel {
    ArimaOrder order{0, 0, 0};
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    double residual_variance = 0.0;
    /// Regression was singular; the model is intercept-only.
    bool degraded = false;
};

/// d-fold first differences; length shrinks by d. Requires series.size() > d.
std::vector<double> difference(std::span<const double> series, int d);

/// Differenced series plus the leading value of every intermediate level,
/// enough to rebuild the original exactly.
struct Differenced {
    std::vector<double> values;
    std::vector<double> heads;  // heads[k] = first element of the k-fold difference
};

Differenced difference_with_heads(std::span<const double> series, int d);
std::vector<double> integrate(const Differenced& diff);

/// True when every root of 1 - sum ar[i] z^(i+1) lies outside the unit circle.
bool is_stationary(std::span<const double> ar);
/// True when every root of 1 + sum ma[j] z^(j+1) lies outside the unit circle.
bool is_invertible(std::span<const double> ma);

/// Throws EstimationError when series.size() < p + q + d + 5, and
/// std::invalid_argument when the order is not usable.
ArimaModel fit(std::span<const double> series, ArimaOrder order);

/// One-step-ahead forecast on the original scale. Residuals are rebuilt by
/// running the model over the history, conditioned on zero pre-sample errors.
double forecast_one(const ArimaModel& model, std::span<const double> history);

/// Conditional sum of squared residuals of `model` over the d-differenced
/// `series`, summing from index max(p, sum_from) of the differenced series.
double conditional_sum_of_squares(const ArimaModel& model, std::span<const double> series,
                                  std::size_t sum_from);

struct AutoOrderOptions {
    int p_max = 3;
    int q_max = 3;
    int d_max = 1;
    /// Differencing continues while var(diff)/var(level) falls below this.
    double variance_ratio = 0.5;
};

struct OrderScore {
    ArimaOrder order;
    double aic = 0.0;
};

/// Picks d with the variance-reduction screen, then the AIC-minimising (p, q)
/// over the full grid. Falls back to (1, 0, 0) when no fit succeeds.
/// Throws EstimationError for series shorter than 30.
ArimaOrder auto_order(std::span<const double> series, const AutoOrderOptions& options = {});

/// Differencing order chosen by the variance screen alone.
int select_differencing(std::span<const double> series, int d_max, double variance_ratio = 0.5);

/// AIC of every feasible grid order at the screened d (for inspection and tests).
std::vector<OrderScore> score_orders(std::span<const double> series,
                                     const AutoOrderOptions& options = {});

}  // namespace vcad
