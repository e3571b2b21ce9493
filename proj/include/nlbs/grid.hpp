// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>

namespace nlbs {

enum class Coordinates { LogPrice, Price };

/// Uniform square grid [lower, upper]^2 with `intervals` cells per axis and
/// `steps` time intervals on [0, T]. The same node coordinates are used for
/// both assets.
struct GridSpec {
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    std::size_t intervals = 100;
    std::size_t steps = 100;
    Coordinates coord = Coordinates::LogPrice;

    bool has_bounds() const { return std::isfinite(lower) && std::isfinite(upper); }
    std::size_t nodes() const { return intervals + 1; }
    double dx() const { return (upper - lower) / static_cast<double>(intervals); }
    double dtau(double maturity) const { return maturity / static_cast<double>(steps); }
    double coordinate(std::size_t i) const { return lower + dx() * static_cast<double>(i); }

    /// Asset price at node index i.
    double price(std::size_t i) const {
        const double x = coordinate(i);
        return coord == Coordinates::LogPrice ? std::exp(x) : x;
    }

    /// Grid coordinate of an asset price.
    double to_coordinate(double s) const {
        return coord == Coordinates::LogPrice ? std::log(s) : s;
    }

    /// Index of the node closest to price s, clamped to the grid.
    std::size_t nearest_index(double s) const {
        const double pos = (to_coordinate(s) - lower) / dx();
        if (!(pos > 0.0)) return 0;
        const auto idx = static_cast<std::size_t>(std::lround(pos));
        return idx > intervals ? intervals : idx;
    }
};

/// Option values on the grid at one time level. Row index i is asset 1,
/// column index j is asset 2.
struct Surface {
    Eigen::MatrixXd values;
    std::size_t level = 0;    // time index m, tau = m * dtau
    std::size_t iterate = 0;  // outer fixed-point index n
};

} // namespace nlbs
