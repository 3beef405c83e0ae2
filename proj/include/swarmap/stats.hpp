#pragma once

#include "swarmap/types.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <span>

namespace swarmap {

struct BatchStats {
    double mean = 0.0;
    double half_width = 0.0;  // 95% two-sided, Student t with n - 1 dof
    std::size_t n = 0;
};

struct insufficient_data_error : error {
    using error::error;
};

inline BatchStats batch_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw insufficient_data_error("confidence interval needs at least two values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    return {mean, q * sd / std::sqrt(static_cast<double>(n)), n};
}

}  // namespace swarmap
