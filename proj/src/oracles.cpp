#include "dormantwalk/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dormantwalk::oracles {

namespace {

std::vector<int> box_strides(int d, int side) {
    std::vector<int> strides(d);
    int s = 1;
    for (int j = 0; j < d; ++j) {
        strides[j] = s;
        s *= side;
    }
    return strides;
}

}  // namespace

WalkDistribution::WalkDistribution(int d, int n_max) : d_(d), n_max_(n_max) {
    if (d < 1 || d > 3) throw std::invalid_argument("WalkDistribution: d must be 1..3");
    side_ = 2 * n_max + 3;  // walk of n steps cannot leave |x| <= n
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) cells *= static_cast<std::size_t>(side_);
    table_.assign(n_max + 1, std::vector<double>(cells, 0.0));

    const std::vector<int> strides = box_strides(d, side_);
    std::size_t center = 0;
    for (int j = 0; j < d; ++j) center += static_cast<std::size_t>(n_max + 1) * strides[j];
    table_[0][center] = 1.0;

    const double step_p = 1.0 / (2.0 * d);
    for (int n = 1; n <= n_max; ++n) {
        const auto& prev = table_[n - 1];
        auto& cur = table_[n];
        for (std::size_t i = 0; i < cells; ++i) {
            const double mass = prev[i];
            if (mass == 0.0) continue;
            // Decode coordinate bounds cheaply: interior guaranteed since the
            // box has a one-cell margin beyond reach.
            for (int j = 0; j < d; ++j) {
                cur[i + strides[j]] += mass * step_p;
                cur[i - strides[j]] += mass * step_p;
            }
        }
    }
}

std::size_t WalkDistribution::flatten(std::span<const int> x) const {
    std::size_t f = 0;
    std::size_t s = 1;
    for (int j = 0; j < d_; ++j) {
        f += static_cast<std::size_t>(x[j] + n_max_ + 1) * s;
        s *= static_cast<std::size_t>(side_);
    }
    return f;
}

double WalkDistribution::probability(int n, std::span<const int> x) const {
    if (n < 0 || n > n_max_) throw std::invalid_argument("WalkDistribution: n out of range");
    for (int j = 0; j < d_; ++j)
        if (std::abs(x[j]) > n_max_ + 1) return 0.0;
    return table_[n][flatten(x)];
}

double series_green_generating(const WalkDistribution& dist, std::span<const int> x, double s,
                               double* tail_bound) {
    double sum = 0.0;
    double weight = 1.0;
    for (int n = 0; n <= dist.max_steps(); ++n) {
        sum += weight * dist.probability(n, x);
        weight *= s;
    }
    if (tail_bound) *tail_bound = weight / (1.0 - s);
    return sum;
}

double series_green_resolvent(const WalkDistribution& dist, std::span<const int> x, double lambda,
                              double* tail_bound) {
    const double r = 1.0 / (1.0 + lambda);
    double sum = 0.0;
    double weight = r;
    for (int n = 0; n <= dist.max_steps(); ++n) {
        sum += weight * dist.probability(n, x);
        weight *= r;
    }
    if (tail_bound) *tail_bound = weight / (1.0 - r);
    return sum;
}

double series_green_avoiding_origin(int d, std::span<const int> x, std::span<const int> y,
                                    double s, int n_max) {
    if (d < 1 || d > 3) throw std::invalid_argument("series_green_avoiding_origin: d must be 1..3");
    const int side = 2 * n_max + 3;
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) cells *= static_cast<std::size_t>(side);
    const std::vector<int> strides = box_strides(d, side);

    auto flatten = [&](std::span<const int> p) {
        std::size_t f = 0;
        std::size_t stride = 1;
        for (int j = 0; j < d; ++j) {
            f += static_cast<std::size_t>(p[j] + n_max + 1) * stride;
            stride *= static_cast<std::size_t>(side);
        }
        return f;
    };

    std::size_t center = 0;
    for (int j = 0; j < d; ++j) center += static_cast<std::size_t>(n_max + 1) * strides[j];
    const std::size_t target = flatten(y);

    std::vector<double> cur(cells, 0.0), next(cells, 0.0);
    cur[flatten(x)] = 1.0;
    double sum = cur[target];  // n = 0 term (start must differ from the origin)
    double weight = 1.0;
    const double step_p = 1.0 / (2.0 * d);
    for (int n = 1; n <= n_max; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            const double mass = cur[i];
            if (mass == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                next[i + strides[j]] += mass * step_p;
                next[i - strides[j]] += mass * step_p;
            }
        }
        weight *= s;
        next[center] = 0.0;  // paths that just hit the origin are discarded
        sum += weight * next[target];
        cur.swap(next);
    }
    return sum;
}

double transient_green_series_d3(int n_pairs, double* est_error) {
    // P(X_{2n} = 0) = (2n)! 6^{-2n} sum_{j+k+l=n} (j! k! l!)^{-2}, summed
    // with an n^{-3/2} Richardson tail.
    const int n_max = n_pairs;
    std::vector<double> logfact(2 * n_max + 1, 0.0);
    for (int i = 1; i <= 2 * n_max; ++i) logfact[i] = logfact[i - 1] + std::log(i);

    auto return_probability = [&](int n) {
        double p = 0.0;
        for (int j = 0; j <= n; ++j)
            for (int k = 0; j + k <= n; ++k) {
                const int l = n - j - k;
                const double lg = logfact[2 * n] - 2.0 * n * std::log(6.0) -
                                  2.0 * (logfact[j] + logfact[k] + logfact[l]);
                p += std::exp(lg);
            }
        return p;
    };

    auto partial = [&](int n_top) {
        double s = 0.0;
        for (int n = 0; n <= n_top; ++n) s += return_probability(n);
        return s;
    };

    // T(N) = S(N) + 2 N P_{2N}(0) corrects the leading c n^{-3/2} tail; a
    // second Richardson step removes the next order.
    const int n_half = n_max / 2;
    const double t_full = partial(n_max) + 2.0 * n_max * return_probability(n_max);
    const double t_half = partial(n_half) + 2.0 * n_half * return_probability(n_half);
    const double r = std::pow(2.0, 1.5);
    const double extrapolated = (r * t_full - t_half) / (r - 1.0);
    if (est_error) *est_error = std::abs(t_full - t_half);
    return extrapolated;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d_max = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() || j < sb.size()) {
        // Consume whole tie blocks (censoring piles an atom on the horizon)
        // before comparing the empirical CDFs.
        double v;
        if (i < sa.size() && j < sb.size())
            v = std::min(sa[i], sb[j]);
        else
            v = i < sa.size() ? sa[i] : sb[j];
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        const double fa = static_cast<double>(i) / sa.size();
        const double fb = static_cast<double>(j) / sb.size();
        d_max = std::max(d_max, std::abs(fa - fb));
    }
    return d_max;
}

}  // namespace dormantwalk::oracles
