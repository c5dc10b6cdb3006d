#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dormantwalk::oracles {

// Verification-only reference computations.  Everything here follows a
// route independent of the quadrature and Bessel evaluations it is used to
// check: step-distribution dynamic programming, explicit multinomial sums,
// and rank statistics.

/// Step distributions P(X_n = x) of the discrete simple walk, n <= n_max,
/// by convolution on a box large enough that no mass leaks.
class WalkDistribution {
  public:
    WalkDistribution(int d, int n_max);
    double probability(int n, std::span<const int> x) const;
    int max_steps() const { return n_max_; }

  private:
    int d_;
    int n_max_;
    int side_;
    std::vector<std::vector<double>> table_;  // per n, flattened box
    std::size_t flatten(std::span<const int> x) const;
};

/// sum_{n <= n_max} s^n P(X_n = x); *tail_bound receives s^{n_max+1}/(1-s).
double series_green_generating(const WalkDistribution& dist, std::span<const int> x, double s,
                               double* tail_bound);

/// sum_{n <= n_max} (1+lambda)^{-(n+1)} P(X_n = x), the resolvent series.
double series_green_resolvent(const WalkDistribution& dist, std::span<const int> x, double lambda,
                              double* tail_bound);

/// sum_{n <= n_max} s^n P_x(X_n = y, origin not visited at steps 1..n).
double series_green_avoiding_origin(int d, std::span<const int> x, std::span<const int> y,
                                    double s, int n_max);

/// sum_n P(X_n = 0) in d = 3 from the exact multinomial return
/// probabilities, with a Richardson-extrapolated n^{-3/2} tail.
double transient_green_series_d3(int n_pairs, double* est_error);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::span<const double> a, std::span<const double> b);

}  // namespace dormantwalk::oracles
