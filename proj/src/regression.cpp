#include "mkdv/regression.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mkdv {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need at least two (x, y) pairs");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        sse += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (n > 2) {
        const double se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
        boost::math::students_t dist(static_cast<double>(n - 2));
        f.slope_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
    }
    return f;
}

bool nondecreasing_within(std::span<const double> values, double slack) {
    double running = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (v < (1.0 - slack) * running) return false;
        running = std::max(running, v);
    }
    return true;
}

bool strictly_decreasing(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] < values[i - 1])) return false;
    return true;
}

}  // namespace mkdv
