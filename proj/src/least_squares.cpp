#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace vcad::detail {

std::optional<std::vector<double>> least_squares(Design x, std::vector<double> y) {
    const std::size_t m = x.rows;
    const std::size_t n = x.cols;
    if (m < n || n == 0) {
        return std::nullopt;
    }
    double max_diag = 0.0;
    std::vector<double> diag(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            norm += x.at(i, k) * x.at(i, k);
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            return std::nullopt;
        }
        const double alpha = x.at(k, k) > 0.0 ? -norm : norm;
        // v = x_k - alpha e_k, stored in place below the diagonal.
        x.at(k, k) -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            vnorm2 += x.at(i, k) * x.at(i, k);
        }
        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) {
                dot += x.at(i, k) * x.at(i, j);
            }
            const double s = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) {
                x.at(i, j) -= s * x.at(i, k);
            }
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            dot += x.at(i, k) * y[i];
        }
        const double s = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) {
            y[i] -= s * x.at(i, k);
        }
        diag[k] = alpha;
        max_diag = std::max(max_diag, std::abs(alpha));
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(diag[k]) <= 1e-10 * max_diag) {
            return std::nullopt;
        }
    }
    std::vector<double> b(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = y[k];
        for (std::size_t j = k + 1; j < n; ++j) {
            s -= x.at(k, j) * b[j];
        }
        b[k] = s / diag[k];
    }
    return b;
}

}  // namespace vcad::detail
