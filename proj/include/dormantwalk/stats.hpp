#pragma once

#include <cmath>
#include <cstdint>

namespace dormantwalk {

/// Sufficient statistics (sum, sum of squares, count).  Merging is
/// associative, so partial results from worker chunks can be reduced in a
/// fixed order independent of the thread count.
struct RunningStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(const RunningStats& other) {
        sum += other.sum;
        sum_sq += other.sum_sq;
        n += other.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

/// Monte Carlo estimate of a survival-type expectation.
struct SurvivalEstimate {
    double t = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
};

}  // namespace dormantwalk
