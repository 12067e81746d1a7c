#pragma once

// Small dense least squares via Householder QR. Internal to the library.

#include <optional>
#include <vector>

namespace vcad::detail {

/// Row-major design matrix.
struct Design {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Minimises ||X b - y||. Returns nothing when X is numerically rank deficient.
std::optional<std::vector<double>> least_squares(Design x, std::vector<double> y);

}  // namespace vcad::detail
