#include "dormantwalk/renewal.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "dormantwalk/green.hpp"
#include "dormantwalk/stats.hpp"
#include "dormantwalk/threads.hpp"

namespace dormantwalk::renewal {

namespace {

constexpr double kExpansionValidity = 1e-2;

std::array<int, 5> origin{};

std::array<int, 5> unit_vector() {
    std::array<int, 5> e{};
    e[0] = 1;
    return e;
}

// Ratio G(0,q) / (G(0,q) - G(e1,q)) in the generating convention; this is
// E[h(Y)] / h(e1) for any admissible harmonic h.
double generating_ratio(const ModelParams& params, double q) {
    const auto e1 = unit_vector();
    const auto g0 = green::green_generating(params.d, std::span(origin.data(), params.d), q);
    const auto ge = green::green_generating(params.d, std::span(e1.data(), params.d), q);
    return g0.value / (g0.value - ge.value);
}

double d1_constant(const ModelParams& params, D1Reading reading) {
    // 1 / (sqrt(kappa+rho) (sqrt(s1^2 + 4 rho s1) - s1)), with the s1 term
    // additionally weighted by rho in the component-chain form.
    const double root = std::sqrt(params.s1 * params.s1 + 4.0 * params.rho * params.s1);
    const double bare = 1.0 / (std::sqrt(params.kappa + params.rho) * (root - params.s1));
    return reading == D1Reading::bare ? bare : params.rho * bare;
}

}  // namespace

GeometricClock make_clock(const ModelParams& params) {
    params.validate();
    const double trap_total = 2.0 * params.d * params.rho;
    GeometricClock clock;
    clock.continuation = trap_total / (params.s1 + trap_total);
    clock.success = params.s1 / (params.s1 + trap_total);
    return clock;
}

double discounted_transform(double mu, double laplace_f, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("discounted_transform: lambda must be > 0");
    if (!(mu > 0.0 && mu <= 1.0))
        throw std::invalid_argument("discounted_transform: mu must lie in (0,1]");
    if (!(laplace_f >= 0.0 && laplace_f <= 1.0))
        throw std::invalid_argument("discounted_transform: laplace_f must lie in [0,1]");
    const double denom = 1.0 - mu * laplace_f;
    if (denom < 1e-14)
        throw NonConvergenceError("discounted_transform: denominator vanishes (mu -> 1, lambda -> 0)",
                                  denom, mu);
    return (mu / lambda) * (1.0 - laplace_f) / denom;
}

double discounted_transform(double mu, const std::function<double(double)>& laplace_f,
                            double lambda) {
    return discounted_transform(mu, laplace_f(lambda), lambda);
}

double clock_escape_probability(const ModelParams& params) {
    params.validate();
    if (!(params.s1 > 0.0))
        throw std::invalid_argument("clock_escape_probability: requires s1 > 0");
    if (params.d == 1) {
        const double root = std::sqrt(params.s1 * params.s1 + 4.0 * params.rho * params.s1);
        return (root - params.s1) / (2.0 * params.rho);
    }
    const GeometricClock clock = make_clock(params);
    const auto e1 = unit_vector();
    const auto g0 =
        green::green_generating(params.d, std::span(origin.data(), params.d), clock.continuation);
    const auto ge =
        green::green_generating(params.d, std::span(e1.data(), params.d), clock.continuation);
    return 1.0 - ge.value / g0.value;
}

Z1Expansion z1_laplace_expansion(const ModelParams& params, double lambda, D1Reading reading) {
    params.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("z1_laplace_expansion: lambda must be > 0");
    if (params.d > 2)
        throw std::invalid_argument("z1_laplace_expansion: defined for d in {1,2} only");

    Z1Expansion out;
    out.within_validity = lambda <= kExpansionValidity;
    const double nu = params.kappa + params.rho;
    const double total = params.s1 + 2.0 * params.d * nu;
    if (params.d == 1) {
        const double s1_term =
            params.s1 > 0.0 ? params.s1 * std::sqrt(nu) * d1_constant(params, reading) : 0.0;
        out.leading_constant = 2.0 * (nu + s1_term) / (std::sqrt(nu) * total);
        out.value = 1.0 - out.leading_constant * std::sqrt(lambda);
    } else {
        const GeometricClock clock = make_clock(params);
        const double ratio = params.s1 > 0.0 ? generating_ratio(params, clock.continuation) : 0.0;
        const double kPi = 3.14159265358979323846;
        out.leading_constant = kPi * (4.0 * nu + params.s1 * ratio) / total;
        out.value = 1.0 - out.leading_constant / std::log(1.0 / lambda);
    }
    return out;
}

EscapeProbability escape_probability_d3(const ModelParams& params) {
    params.validate();
    if (params.d < 3) throw std::invalid_argument("escape_probability_d3: requires d >= 3");
    const int d = params.d;
    const double nu = params.kappa + params.rho;
    const double total = params.s1 + 2.0 * d * nu;
    const auto e1 = unit_vector();
    const double w0 = green::green_transient_discrete(d, std::span(origin.data(), d));
    const double we1 = green::green_transient_discrete(d, std::span(e1.data(), d));

    double ratio = 0.0;  // G(0,q) / (G(0,q) - G(e1,q)); unused branch at s1 = 0
    if (params.s1 > 0.0) ratio = generating_ratio(params, make_clock(params).continuation);

    EscapeProbability out;
    // Escape from the wake position via the centered harmonic
    // h(x) = 1 - W(x)/W(0) (it vanishes at the origin, so optional stopping
    // applies): E[h(Y)] = h(e1) * ratio = ratio / W(0).
    out.value = (2.0 * d * nu + params.s1 * ratio) / (total * w0);
    out.renewal_green = 1.0 / (total * out.value);

    // Closed form as published, under each normalization of the transient
    // Green values (the q-kernel enters only through the scale-free ratio).
    const auto literal = [&](double g0, double ge1) {
        return 1.0 - (2.0 * d * nu * nu + params.s1 * ge1 * ratio) / (total * g0);
    };
    out.literal_occupation = literal(w0 / (2.0 * d), we1 / (2.0 * d));
    out.literal_discrete = literal(w0, we1);
    out.literal_occupation_valid = out.literal_occupation >= 0.0 && out.literal_occupation <= 1.0;
    out.literal_discrete_valid = out.literal_discrete >= 0.0 && out.literal_discrete <= 1.0;
    out.gtilde_occupation = total * (w0 / (2.0 * d)) /
                            (2.0 * d * nu * nu + params.s1 * (we1 / (2.0 * d)) * ratio);
    out.gtilde_discrete = total * w0 / (2.0 * d * nu * nu + params.s1 * we1 * ratio);
    return out;
}

namespace {

double potential_cached(int x1, int x2) {
    // Symmetric in |x1|, |x2|; keyed on the sorted pair.
    int a = std::abs(x1), b = std::abs(x2);
    if (a < b) std::swap(a, b);
    static std::unordered_map<int, double> cache;
    static std::mutex mu;
    const int key = a * 4096 + b;
    {
        std::scoped_lock lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = green::potential_kernel_reduced(a, b);
    std::scoped_lock lock(mu);
    cache.emplace(key, value);
    return value;
}

double harmonic_value(const ModelParams& params, HarmonicFunction h, const std::array<int, 5>& y) {
    switch (h) {
        case HarmonicFunction::abs_d1:
            return std::abs(y[0]);
        case HarmonicFunction::potential_d2:
            return potential_cached(y[0], y[1]);
        case HarmonicFunction::green_d3:
            // Centered transient kernel W(0) - W(x): vanishes at the origin
            // like the potential kernel, which the stopping identity needs.
            return green::green_transient_discrete(params.d, std::span(origin.data(), params.d)) -
                   green::green_transient_discrete(params.d, std::span(y.data(), params.d));
    }
    return 0.0;
}

}  // namespace

HarmonicCheckReport harmonic_identity_check(const ModelParams& params, HarmonicFunction h,
                                            std::uint64_t trials, std::uint64_t seed) {
    params.validate();
    if (!(params.s1 > 0.0))
        throw std::invalid_argument("harmonic_identity_check: requires s1 > 0");
    const GeometricClock clock = make_clock(params);
    const std::uint64_t chunk = 8192;
    const std::uint64_t chunks = (trials + chunk - 1) / chunk;
    std::vector<RunningStats> win_parts(chunks), prod_parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        RunningStats win, prod;
        const std::uint64_t begin = c * chunk;
        const std::uint64_t end = std::min(trials, begin + chunk);
        for (std::uint64_t i = begin; i < end; ++i) {
            Pcg32 rng(seed, i);
            std::array<int, 5> pos{};
            pos[0] = 1;
            bool won = false;
            for (;;) {
                if (rng.next_double() < clock.success) {
                    won = true;
                    break;
                }
                const std::uint32_t dir = rng.bounded(2u * params.d);
                pos[dir >> 1] += (dir & 1) ? 1 : -1;
                bool at_origin = true;
                for (int j = 0; j < params.d; ++j)
                    if (pos[j] != 0) at_origin = false;
                if (at_origin) break;
            }
            win.add(won ? 1.0 : 0.0);
            prod.add(won ? harmonic_value(params, h, pos) : 0.0);
        }
        win_parts[c] = win;
        prod_parts[c] = prod;
    });
    RunningStats win, prod;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        win.merge(win_parts[c]);
        prod.merge(prod_parts[c]);
    }

    HarmonicCheckReport report;
    report.trials = trials;
    report.win_rate = win.mean();
    report.win_rate_std_error = win.std_error();
    report.predicted_win_rate = clock_escape_probability(params);
    report.conditional_mean = win.sum > 0.0 ? prod.sum / win.sum : 0.0;
    report.product_mean = prod.mean();
    report.product_std_error = prod.std_error();
    const auto e1 = unit_vector();
    report.h_e1 = harmonic_value(params, h, e1);
    report.z_product = report.product_std_error > 0.0
                           ? (report.product_mean - report.h_e1) / report.product_std_error
                           : 0.0;
    report.z_win = report.win_rate_std_error > 0.0
                       ? (report.win_rate - report.predicted_win_rate) / report.win_rate_std_error
                       : 0.0;
    return report;
}

namespace {

// First passage to the origin of the continuous-time walk with per-neighbour
// rate nu, started at `pos`; adds elapsed time to t, stops at the horizon.
bool walk_to_origin(const ModelParams& params, double nu, std::array<int, 5>& pos, double& t,
                    double horizon, Pcg32& rng) {
    const double rate = 2.0 * params.d * nu;
    for (;;) {
        t += rng.exponential(rate);
        if (t >= horizon) return false;
        const std::uint32_t dir = rng.bounded(2u * params.d);
        pos[dir >> 1] += (dir & 1) ? 1 : -1;
        bool at_origin = true;
        for (int j = 0; j < params.d; ++j)
            if (pos[j] != 0) at_origin = false;
        if (at_origin) return true;
    }
}

}  // namespace

RegenerationSample sample_z1_decomposed(const ModelParams& params, double horizon, Pcg32& rng) {
    params.validate();
    const double nu = params.kappa + params.rho;
    const double total = params.s1 + 2.0 * params.d * nu;
    double t = rng.exponential(total);
    if (t >= horizon) return {horizon, true};

    std::array<int, 5> pos{};
    if (rng.next_double() * total < 2.0 * params.d * nu) {
        // Jump branch: active walk from a uniformly chosen neighbour.
        const std::uint32_t dir = rng.bounded(2u * params.d);
        pos[dir >> 1] += (dir & 1) ? 1 : -1;
        if (!walk_to_origin(params, nu, pos, t, horizon, rng)) return {horizon, true};
        return {t, false};
    }

    // Dormant branch: trap-driven excursions from the origin, the wake clock
    // (rate s0) running only away from it.
    const double trap_rate = 2.0 * params.d * params.rho;
    for (;;) {
        t += rng.exponential(trap_rate);  // trap leaves the walker's site
        if (t >= horizon) return {horizon, true};
        std::array<int, 5> z{};
        const std::uint32_t dir = rng.bounded(2u * params.d);
        z[dir >> 1] += (dir & 1) ? 1 : -1;
        bool woke = false;
        while (!woke) {
            t += rng.exponential(trap_rate + params.s0);
            if (t >= horizon) return {horizon, true};
            if (rng.next_double() * (trap_rate + params.s0) < params.s0) {
                woke = true;
                break;
            }
            const std::uint32_t step = rng.bounded(2u * params.d);
            z[step >> 1] += (step & 1) ? 1 : -1;
            bool at_origin = true;
            for (int j = 0; j < params.d; ++j)
                if (z[j] != 0) at_origin = false;
            if (at_origin) break;  // excursion closed before the clock fired
        }
        if (!woke) continue;
        // Awake at z: active walk back to the origin.
        if (!walk_to_origin(params, nu, z, t, horizon, rng)) return {horizon, true};
        return {t, false};
    }
}

}  // namespace dormantwalk::renewal
