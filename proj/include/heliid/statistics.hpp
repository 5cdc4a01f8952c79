#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "heliid/error.hpp"

namespace heliid {

struct ConfidenceInterval {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
};

/// Two-sided Student-t interval mean +/- t_{(1-level)/2, n-1} s / sqrt(n).
/// One sample or zero spread gives lower == upper == mean.
inline ConfidenceInterval t_interval(std::span<const double> samples, double level = 0.95)
{
    if (samples.empty()) throw InputError("confidence interval of an empty sample");
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) return {*lo, *lo, *lo};
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;

    ConfidenceInterval ci{mean, mean, mean};
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double s = std::sqrt(ss / (n - 1.0));

    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
    const double a = mean - t * s / std::sqrt(n);
    const double b = mean + t * s / std::sqrt(n);
    ci.lower = std::min(a, b);
    ci.upper = std::max(a, b);
    return ci;
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
inline double median(std::span<const double> samples)
{
    if (samples.empty()) throw InputError("median of an empty sample");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace heliid
