#pragma once

#include <span>

namespace mkdv {

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// 95% two-sided Student-t half-width of the slope; 0 when n <= 2.
    double slope_halfwidth = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// True when every value is at least (1 - slack) times the running maximum
/// of the preceding ones, i.e. the sequence is nondecreasing up to dips of
/// relative size `slack`.
bool nondecreasing_within(std::span<const double> values, double slack);

/// True when each value is strictly below its predecessor.
bool strictly_decreasing(std::span<const double> values);

}  // namespace mkdv
