#include "dormantwalk/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace dormantwalk::green {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelTol = 1e-10;  // node-doubling stop for the Brillouin quadratures

// ---------------------------------------------------------------------------
// Gauss-Legendre rules on [-1, 1], cached per order.
// ---------------------------------------------------------------------------

struct GlRule {
    std::vector<double> node;
    std::vector<double> weight;
};

GlRule make_gl_rule(int n) {
    GlRule rule;
    rule.node.resize(n);
    rule.weight.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P_n'(x).
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.node[i] = -x;
        rule.node[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weight[i] = w;
        rule.weight[n - 1 - i] = w;
    }
    return rule;
}

const GlRule& gl_rule(int order) {
    static std::map<int, GlRule> cache;
    static std::mutex mu;
    std::scoped_lock lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gl_rule(order)).first;
    return it->second;
}

// ---------------------------------------------------------------------------
// One axis of the Brillouin grid: composite Gauss-Legendre nodes on [-pi, pi]
// with panels halving dyadically toward k = 0 until the panel width falls
// below `scale`.  The layout is symmetric and even orders put no node at 0,
// so removable-singularity integrands are never evaluated exactly there.
// ---------------------------------------------------------------------------

struct AxisGrid {
    std::vector<double> k;
    std::vector<double> w;
    std::vector<double> s2;  // sin^2(k/2), the stable ingredient of 1 - phi
};

AxisGrid graded_axis(double scale, int order) {
    int levels = 0;
    if (scale < kPi) levels = std::min(34, static_cast<int>(std::ceil(std::log2(kPi / scale))));
    std::vector<std::pair<double, double>> panels;
    const double h0 = kPi * std::ldexp(1.0, -levels);
    panels.emplace_back(-h0, h0);
    for (int j = 0; j < levels; ++j) {
        const double lo = kPi * std::ldexp(1.0, j - levels);
        const double hi = 2.0 * lo;
        panels.emplace_back(lo, hi);
        panels.emplace_back(-hi, -lo);
    }
    const GlRule& rule = gl_rule(order);
    AxisGrid grid;
    grid.k.reserve(panels.size() * order);
    grid.w.reserve(panels.size() * order);
    for (const auto& [lo, hi] : panels) {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (int i = 0; i < order; ++i) {
            grid.k.push_back(mid + half * rule.node[i]);
            grid.w.push_back(half * rule.weight[i]);
        }
    }
    grid.s2.resize(grid.k.size());
    for (std::size_t i = 0; i < grid.k.size(); ++i) {
        const double s = std::sin(0.5 * grid.k[i]);
        grid.s2[i] = s * s;
    }
    return grid;
}

enum class TrigKind { cos_kx, one_minus_cos_kx };

struct TensorSums {
    long double re = 0.0L;
    long double im = 0.0L;
    long double abs_re = 0.0L;  // L1 mass; the cancellation floor of `re`
};

// g maps (1 - phi(k)) to the spectral weight of the kernel being integrated.
template <class G>
TensorSums tensor_sum(int d, const AxisGrid& ax, const int* x, G&& g, TrigKind kind,
                      bool want_imag) {
    TensorSums out;
    const std::size_t n = ax.k.size();
    const double inv_d2 = 2.0 / d;
    auto body = [&](double wprod, double dot, double s2sum) {
        const double gv = g(inv_d2 * s2sum);
        if (kind == TrigKind::one_minus_cos_kx) {
            const double s = std::sin(0.5 * dot);
            const double term = wprod * (2.0 * s * s * gv);
            out.re += term;
            out.abs_re += std::abs(term);
        } else {
            const double term = wprod * std::cos(dot) * gv;
            out.re += term;
            out.abs_re += std::abs(wprod * gv);
            if (want_imag) out.im += wprod * std::sin(dot) * gv;
        }
    };
    if (d == 1) {
        for (std::size_t i = 0; i < n; ++i) body(ax.w[i], ax.k[i] * x[0], ax.s2[i]);
    } else if (d == 2) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w0 = ax.w[i], dot0 = ax.k[i] * x[0], s0 = ax.s2[i];
            for (std::size_t j = 0; j < n; ++j)
                body(w0 * ax.w[j], dot0 + ax.k[j] * x[1], s0 + ax.s2[j]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double w0 = ax.w[i], dot0 = ax.k[i] * x[0], s0 = ax.s2[i];
            for (std::size_t j = 0; j < n; ++j) {
                const double w1 = w0 * ax.w[j], dot1 = dot0 + ax.k[j] * x[1],
                             s1 = s0 + ax.s2[j];
                for (std::size_t l = 0; l < n; ++l)
                    body(w1 * ax.w[l], dot1 + ax.k[l] * x[2], s1 + ax.s2[l]);
            }
        }
    }
    return out;
}

struct QuadOut {
    double value = 0.0;
    double est_error = 0.0;
};

// Node-doubling driver.  Doubles the per-panel order until the relative
// change is below kRelTol; reports the last change as the error estimate.
template <class G>
QuadOut brillouin_quad(int d, const int* x, double scale, G&& g, TrigKind kind, bool want_imag,
                       const char* what) {
    if (d < 1 || d > 3) throw std::invalid_argument("brillouin_quad: d must be 1, 2 or 3");
    // Higher ceilings where the grid is cheap: oscillatory cos(k x) factors
    // at large |x| need the extra orders.
    const int max_order = d == 1 ? 512 : (d == 2 ? 256 : 64);
    const double norm = std::pow(2.0 * kPi, d);
    double prev = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    for (int order = 16; order <= max_order; order *= 2) {
        const AxisGrid ax = graded_axis(scale, order);
        const TensorSums sums = tensor_sum(d, ax, x, g, kind, want_imag);
        value = static_cast<double>(sums.re) / norm;
        // Cancellation floor: a heavily oscillatory integrand cannot be
        // certified below round-off on its L1 mass.
        const double floor = 1e-15 * static_cast<double>(sums.abs_re) / norm;
        if (want_imag) {
            const double imag = std::abs(static_cast<double>(sums.im)) / norm;
            if (imag > 1e-12 * std::max(1.0, std::abs(value)))
                throw NonConvergenceError(std::string(what) + ": imaginary part failed to vanish",
                                          imag, value);
        }
        if (!std::isnan(prev)) {
            const double change = std::abs(value - prev);
            if (change <= kRelTol * std::abs(value) + floor) return QuadOut{value, change};
        }
        prev = value;
    }
    throw NonConvergenceError(std::string(what) + ": node doubling did not converge", prev, value);
}

void check_argument(int d, std::span<const int> x) {
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument("lattice argument size does not match dimension");
}

std::array<int, 5> padded(std::span<const int> x) {
    std::array<int, 5> out{};
    std::copy(x.begin(), x.end(), out.begin());
    return out;
}

// ---------------------------------------------------------------------------
// Scaled modified Bessel function e^{-t} I_m(t).
//
// Power series for small and moderate t (long double keeps the unscaled
// series finite up to t ~ 1e4), the standard large-argument asymptotic
// series once t clears ~1.6 m^2, and a full-period trapezoid evaluation of
// the integral representation for the rare extreme orders in between.
// ---------------------------------------------------------------------------

double bessel_series(int m, double t) {
    const long double half = 0.5L * static_cast<long double>(t);
    long double term = 1.0L;
    for (int j = 1; j <= m; ++j) term *= half / j;
    long double sum = term;
    const long double half2 = half * half;
    for (int k = 1; k < 400000; ++k) {
        term *= half2 / (static_cast<long double>(k) * (k + m));
        sum += term;
        if (term < sum * 1e-19L && static_cast<long double>(k) * (k + m) > half2) break;
    }
    return static_cast<double>(sum * std::exp(-static_cast<long double>(t)));
}

double bessel_asymptotic(int m, double t) {
    const double mu = 4.0 * static_cast<double>(m) * m;
    double term = 1.0;
    double sum = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 24; ++k) {
        const double f = 2.0 * k - 1.0;
        term *= -(mu - f * f) / (8.0 * k * t);
        const double mag = std::abs(term);
        if (mag >= prev_mag) break;  // smallest-term truncation
        sum += term;
        prev_mag = mag;
        if (mag < 1e-19 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * kPi * t);
}

double bessel_trapezoid(int m, double t) {
    const int n = m + static_cast<int>(std::ceil(std::sqrt(80.0 * t))) + 64;
    const double h = kPi / n;
    long double sum = 0.5L * (1.0L + std::exp(-2.0L * static_cast<long double>(t)) *
                                         (m % 2 == 0 ? 1.0L : -1.0L));
    for (int i = 1; i < n; ++i) {
        const double theta = i * h;
        sum += std::exp(t * (std::cos(theta) - 1.0)) * std::cos(m * theta);
    }
    return static_cast<double>(sum) * h / kPi;
}

}  // namespace

double scaled_bessel_i(int m, double t) {
    m = std::abs(m);
    if (!(t >= 0.0)) throw std::invalid_argument("scaled_bessel_i: t must be >= 0");
    if (t == 0.0) return m == 0 ? 1.0 : 0.0;
    const double asym_from = std::max(60.0, 1.6 * m * m + 20.0);
    if (t >= asym_from) return bessel_asymptotic(m, t);
    if (t <= 1e4) return bessel_series(m, t);
    return bessel_trapezoid(m, t);
}

double structure_function(std::span<const double> k) {
    if (k.empty() || k.size() > 5)
        throw std::invalid_argument("structure_function: need 1..5 components");
    double sum = 0.0;
    for (double kj : k) sum += std::cos(kj);
    return sum / static_cast<double>(k.size());
}

namespace {

// ---------------------------------------------------------------------------
// Green kernels along the Bessel product integral:
//   resolvent(x, lambda) = d * int_0^inf e^{-lambda d u} prod_j ibar_{x_j}(u) du,
// with ibar_m(u) = e^{-u} I_m(u).  For lambda = 0 (transient sums, d >= 3)
// the tail past the numeric cutoff is integrated term-by-term from the
// asymptotic expansion prod_j ibar ~ (2 pi u)^{-d/2} sum_K c_K u^{-K}.
// ---------------------------------------------------------------------------

struct BesselGreenOut {
    double value = 0.0;
    double est_error = 0.0;
};

double bessel_integrand(int d, const std::array<int, 5>& m, double u) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= scaled_bessel_i(m[j], u);
    return prod;
}

// Asymptotic tail coefficients c_0..c_K of prod_j ibar_{m_j}.
std::vector<double> tail_coefficients(int d, const std::array<int, 5>& m, int order) {
    std::vector<double> coeffs{1.0};
    for (int j = 0; j < d; ++j) {
        const double mu = 4.0 * static_cast<double>(m[j]) * m[j];
        std::vector<double> factor(order + 1);
        factor[0] = 1.0;
        double a = 1.0;
        for (int k = 1; k <= order; ++k) {
            const double f = 2.0 * k - 1.0;
            a *= -(mu - f * f) / (8.0 * k);
            factor[k] = a;
        }
        std::vector<double> next(order + 1, 0.0);
        for (std::size_t p = 0; p < coeffs.size(); ++p)
            for (int q = 0; static_cast<int>(p) + q <= order; ++q)
                next[p + q] += coeffs[p] * factor[q];
        coeffs = std::move(next);
    }
    return coeffs;
}

BesselGreenOut bessel_green(int d, const std::array<int, 5>& m, double lambda) {
    const double a = lambda * d;
    int mmax = 0;
    for (int j = 0; j < d; ++j) mmax = std::max(mmax, std::abs(m[j]));
    double cutoff = std::max({80.0, 1.5 * mmax * mmax + 40.0, lambda == 0.0 ? 600.0 : 0.0});

    double tail = 0.0, tail_err = 0.0;
    if (lambda > 0.0) {
        // Drop the tail once its bound is negligible: prod ibar <= 1.2^d (2 pi u)^{-d/2}.
        auto bound = [&](double T) {
            return std::pow(1.2, d) * std::pow(2.0 * kPi * T, -0.5 * d) * std::exp(-a * T) / a;
        };
        int guard = 0;
        while (bound(cutoff) > 1e-14 && ++guard < 200) cutoff *= 1.3;
        tail_err = bound(cutoff);
    } else {
        if (d < 3)
            throw std::invalid_argument("bessel_green: lambda = 0 requires d >= 3 (transience)");
        constexpr int kTailOrder = 12;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const std::vector<double> c = tail_coefficients(d, m, kTailOrder);
            tail = 0.0;
            double last = 0.0;
            for (int k = 0; k <= kTailOrder; ++k) {
                const double p = 0.5 * d - 1.0 + k;
                last = c[k] * std::pow(cutoff, -p) / p;
                tail += last;
            }
            tail *= std::pow(2.0 * kPi, -0.5 * d);
            tail_err = 4.0 * std::abs(last) * std::pow(2.0 * kPi, -0.5 * d);
            if (tail_err < 1e-12) break;
            cutoff *= 1.5;
        }
        if (tail_err >= 1e-12)
            throw NonConvergenceError("bessel_green: tail bound unreachable", tail, tail_err);
    }

    // Composite panels on [0, cutoff]: width 4 up to u = 64, then geometric.
    std::vector<double> edges{0.0};
    while (edges.back() < std::min(64.0, cutoff)) edges.push_back(edges.back() + 4.0);
    while (edges.back() < cutoff) edges.push_back(std::min(cutoff, edges.back() * 1.25));

    double prev = std::numeric_limits<double>::quiet_NaN();
    double integral = 0.0, change = 0.0;
    for (int order = 16; order <= 64; order *= 2) {
        const GlRule& rule = gl_rule(order);
        long double acc = 0.0L;
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double mid = 0.5 * (edges[p] + edges[p + 1]);
            const double half = 0.5 * (edges[p + 1] - edges[p]);
            for (int i = 0; i < order; ++i) {
                const double u = mid + half * rule.node[i];
                double f = bessel_integrand(d, m, u);
                if (a > 0.0) f *= std::exp(-a * u);
                acc += half * rule.weight[i] * f;
            }
        }
        integral = static_cast<double>(acc);
        if (!std::isnan(prev)) {
            change = std::abs(integral - prev);
            if (change <= 1e-12 * std::max(std::abs(integral), 1e-300)) break;
        }
        prev = integral;
    }
    return BesselGreenOut{d * (integral + tail), d * (change + tail_err)};
}

std::uint64_t transient_cache_key(int d, const std::array<int, 5>& m) {
    std::array<int, 5> s = m;
    for (auto& v : s) v = std::abs(v);
    std::sort(s.begin(), s.end(), std::greater<>());
    std::uint64_t key = static_cast<std::uint64_t>(d);
    for (int v : s) key = (key << 10) | static_cast<std::uint64_t>(std::min(v, 1023));
    return key;
}

}  // namespace

GreenValue green_resolvent(int d, std::span<const int> x, double lambda) {
    if (d < 1 || d > 5) throw std::invalid_argument("green_resolvent: d must be in {1,...,5}");
    check_argument(d, x);
    if (!(lambda > 0.0)) throw std::invalid_argument("green_resolvent: lambda must be > 0");
    GreenValue out;
    out.dim = d;
    out.convention = Convention::resolvent;
    out.x = padded(x);
    out.parameter = lambda;
    // In d = 3 the tensor grid stays affordable only while the k = 0 peak is
    // mild; below that the Bessel product integral takes over (it is the
    // only route in d >= 4 and at lambda = 0 anyway).
    const bool tensor = d <= 2 || (d == 3 && lambda >= 0.01);
    if (tensor) {
        const double scale = std::clamp(std::sqrt(2.0 * d * lambda), 1e-8, kPi);
        const QuadOut q = brillouin_quad(
            d, x.data(), scale, [lambda](double omp) { return 1.0 / (lambda + omp); },
            TrigKind::cos_kx, true, "green_resolvent");
        out.value = q.value;
        out.est_error = q.est_error;
    } else {
        const BesselGreenOut b = bessel_green(d, out.x, lambda);
        out.value = b.value;
        out.est_error = b.est_error;
    }
    return out;
}

GreenValue green_generating(int d, std::span<const int> x, double s) {
    if (d < 1 || d > 5) throw std::invalid_argument("green_generating: d must be in {1,...,5}");
    check_argument(d, x);
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument(
            "green_generating: s must lie in (0,1); use green_transient_* for s = 1");
    GreenValue out;
    out.dim = d;
    out.convention = Convention::generating;
    out.x = padded(x);
    out.parameter = s;
    const double lambda_eff = (1.0 - s) / s;
    const bool tensor = d <= 2 || (d == 3 && lambda_eff >= 0.01);
    if (tensor) {
        const double scale = std::clamp(std::sqrt(2.0 * d * lambda_eff), 1e-8, kPi);
        const QuadOut q = brillouin_quad(
            d, x.data(), scale, [s](double omp) { return 1.0 / ((1.0 - s) + s * omp); },
            TrigKind::cos_kx, true, "green_generating");
        out.value = q.value;
        out.est_error = q.est_error;
    } else {
        const BesselGreenOut b = bessel_green(d, out.x, lambda_eff);
        out.value = b.value / s;
        out.est_error = b.est_error / s;
    }
    return out;
}

PotentialKernelValue potential_kernel(std::span<const int> x) {
    check_argument(2, x);
    const QuadOut q =
        brillouin_quad(2, x.data(), 1e-8, [](double omp) { return 1.0 / omp; },
                       TrigKind::one_minus_cos_kx, false, "potential_kernel");
    return PotentialKernelValue{{x[0], x[1]}, q.value, q.est_error};
}

double potential_kernel_reduced(int x1, int x2) {
    // Contour integration in k1 collapses the Brillouin integral to
    //   a(x) = (2/pi) int_0^pi (1 - r(k)^{|x1|} cos(k x2)) / sqrt(c^2-1) dk,
    // with c(k) = 2 - cos(k) = 1 + eps and r = c - sqrt(c^2-1).  Written in
    // eps = 2 sin^2(k/2) the k -> 0 endpoint is removable and the integrand
    // analytic, so plain composite Gauss-Legendre converges geometrically.
    const int ax1 = std::abs(x1);
    const int ax2 = std::abs(x2);
    if (ax1 == 0 && ax2 == 0) return 0.0;

    constexpr int kPanels = 16;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    for (int order = 32; order <= 256; order *= 2) {
        const GlRule& rule = gl_rule(order);
        long double acc = 0.0L;
        for (int p = 0; p < kPanels; ++p) {
            const double lo = kPi * p / kPanels;
            const double hi = kPi * (p + 1) / kPanels;
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (int i = 0; i < order; ++i) {
                const double k = mid + half * rule.node[i];
                const double sh = std::sin(0.5 * k);
                const double eps = 2.0 * sh * sh;               // c - 1
                const double root = std::sqrt(eps * (eps + 2.0));  // sqrt(c^2 - 1)
                const double r = (1.0 + eps) - root;
                acc += half * rule.weight[i] *
                       (1.0 - std::pow(r, ax1) * std::cos(k * ax2)) / root;
            }
        }
        value = 2.0 / kPi * static_cast<double>(acc);
        if (!std::isnan(prev) && std::abs(value - prev) <= 1e-12 * std::max(std::abs(value), 1.0))
            return value;
        prev = value;
    }
    throw NonConvergenceError("potential_kernel_reduced did not converge", prev, value);
}

double error_kernel(std::span<const int> x, double lambda) {
    check_argument(2, x);
    if (!(lambda > 0.0)) throw std::invalid_argument("error_kernel: lambda must be > 0");
    const double scale = std::clamp(std::sqrt(4.0 * lambda), 1e-8, kPi);
    const QuadOut q = brillouin_quad(
        2, x.data(), scale,
        [lambda](double omp) { return -lambda / ((lambda + omp) * omp); },
        TrigKind::one_minus_cos_kx, false, "error_kernel");
    return q.value;
}

double green_transient_discrete(int d, std::span<const int> x) {
    if (d < 3) throw std::invalid_argument("green_transient_discrete: requires d >= 3");
    if (d > 5) throw std::invalid_argument("green_transient_discrete: d must be <= 5");
    check_argument(d, x);
    const std::array<int, 5> m = padded(x);

    static std::unordered_map<std::uint64_t, double> cache;
    static std::mutex mu;
    const std::uint64_t key = transient_cache_key(d, m);
    {
        std::scoped_lock lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = bessel_green(d, m, 0.0).value;
    std::scoped_lock lock(mu);
    cache.emplace(key, value);
    return value;
}

double green_transient_occupation(int d, std::span<const int> x) {
    return green_transient_discrete(d, x) / (2.0 * d);
}

double hitting_transform_1d(double nu, double lambda) {
    if (!(nu > 0.0)) throw std::invalid_argument("hitting_transform_1d: nu must be > 0");
    if (lambda < 0.0) throw std::invalid_argument("hitting_transform_1d: lambda must be >= 0");
    const double b = lambda + 2.0 * nu;
    // ((b - sqrt(b^2 - 4 nu^2)) / (2 nu), rationalized for small lambda.
    return 2.0 * nu / (b + std::sqrt(b * b - 4.0 * nu * nu));
}

std::string tabulate_csv(std::span<const GreenValue> values) {
    std::ostringstream os;
    os << "dim,convention,x,parameter,value,est_error\n";
    char buf[128];
    for (const GreenValue& v : values) {
        os << v.dim << ',' << (v.convention == Convention::resolvent ? "resolvent" : "generating")
           << ',';
        for (int j = 0; j < v.dim; ++j) os << (j ? ";" : "") << v.x[j];
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", v.parameter, v.value, v.est_error);
        os << buf;
    }
    return os.str();
}

}  // namespace dormantwalk::green
