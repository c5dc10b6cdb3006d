#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>

#include "dormantwalk/green.hpp"
#include "dormantwalk/oracles.hpp"
#include "dormantwalk/rng.hpp"

using namespace dormantwalk;
namespace green = dormantwalk::green;
namespace oracles = dormantwalk::oracles;

namespace {
constexpr double kPi = std::numbers::pi;
const std::array<int, 3> kOrigin3{0, 0, 0};
const std::array<int, 3> kE1_3{1, 0, 0};
const std::array<int, 2> kOrigin2{0, 0};
const std::array<int, 2> kE1_2{1, 0};
}  // namespace

TEST_CASE("structure function endpoints") {
    const std::array<double, 2> zero{0.0, 0.0};
    CHECK(green::structure_function(zero) == doctest::Approx(1.0));
    const std::array<double, 2> corner{kPi, kPi};
    CHECK(green::structure_function(corner) == doctest::Approx(-1.0));
    const std::array<double, 2> edge{kPi, 0.0};
    CHECK(green::structure_function(edge) == doctest::Approx(0.0));
}

TEST_CASE("scaled bessel reference values") {
    // Frozen against an independent library evaluation of e^{-t} I_m(t).
    CHECK(green::scaled_bessel_i(0, 1.0) == doctest::Approx(0.4657596075936404).epsilon(1e-12));
    CHECK(green::scaled_bessel_i(0, 55.0) == doctest::Approx(0.05391689849393877).epsilon(1e-12));
    CHECK(green::scaled_bessel_i(3, 100.0) == doctest::Approx(0.03817817317558649).epsilon(1e-12));
    CHECK(green::scaled_bessel_i(-3, 100.0) == green::scaled_bessel_i(3, 100.0));
    CHECK(green::scaled_bessel_i(0, 0.0) == 1.0);
    CHECK(green::scaled_bessel_i(2, 0.0) == 0.0);
}

TEST_CASE("scaled bessel regime handoffs are seamless") {
    for (const auto& [m, t] : {std::pair{0, 60.0}, {4, 45.6}, {12, 250.4}, {85, 10000.0}}) {
        const double below = green::scaled_bessel_i(m, t * (1 - 1e-12));
        const double above = green::scaled_bessel_i(m, t * (1 + 1e-12));
        CHECK(std::abs(below - above) < 1e-9 * std::max(below, 1e-30));
    }
}

TEST_CASE("transient green values against the walk-series oracle") {
    const double w0 = green::green_transient_discrete(3, kOrigin3);
    double oracle_err = 0.0;
    const double oracle = oracles::transient_green_series_d3(280, &oracle_err);
    CHECK(std::abs(w0 - oracle) < 3.0 * oracle_err + 2e-5);
    CHECK(w0 == doctest::Approx(1.5163860591).epsilon(2e-9));

    const double we1 = green::green_transient_discrete(3, kE1_3);
    CHECK(we1 == doctest::Approx(w0 - 1.0).epsilon(1e-9));
    // Return probability of the three-dimensional walk.
    CHECK(we1 / w0 == doctest::Approx(0.3405373296).epsilon(1e-7));
}

TEST_CASE("transient green decays monotonically along an axis") {
    double prev = green::green_transient_discrete(3, kOrigin3);
    for (int r = 1; r <= 6; ++r) {
        const std::array<int, 3> x{r, 0, 0};
        const double value = green::green_transient_discrete(3, x);
        CHECK(value < prev);
        CHECK(value > 0.0);
        prev = value;
    }
}

TEST_CASE("transient green in four and five dimensions") {
    const std::array<int, 4> o4{};
    const std::array<int, 5> o5{};
    const double w4 = green::green_transient_discrete(4, o4);
    const double w5 = green::green_transient_discrete(5, o5);
    // More room to escape: fewer expected returns.
    CHECK(w4 > w5);
    CHECK(w5 > 1.0);
    CHECK(w4 == doctest::Approx(1.2394671218).epsilon(1e-6));
    const std::array<int, 4> e4{1, 0, 0, 0};
    CHECK(green::green_transient_discrete(4, e4) == doctest::Approx(w4 - 1.0).epsilon(1e-8));
}

TEST_CASE("potential kernel classic values") {
    CHECK(green::potential_kernel(kOrigin2).value == 0.0);
    const auto a1 = green::potential_kernel(kE1_2);
    CHECK(a1.value == doctest::Approx(1.0).epsilon(1e-10));
    const std::array<int, 2> diag{1, 1};
    CHECK(green::potential_kernel(diag).value == doctest::Approx(4.0 / kPi).epsilon(1e-10));
}

TEST_CASE("potential kernel harmonicity at e1") {
    const std::array<int, 2> x20{2, 0};
    const std::array<int, 2> x11{1, 1};
    const double lhs = 4.0 * green::potential_kernel(kE1_2).value;
    const double rhs =
        green::potential_kernel(kOrigin2).value + green::potential_kernel(x20).value +
        2.0 * green::potential_kernel(x11).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("reduced potential kernel agrees with the Brillouin quadrature") {
    for (const auto& [x1, x2] : {std::pair{1, 0}, {0, 1}, {1, 1}, {5, 3}, {2, -2}}) {
        const std::array<int, 2> x{x1, x2};
        CHECK(green::potential_kernel_reduced(x1, x2) ==
              doctest::Approx(green::potential_kernel(x).value).epsilon(1e-9));
    }
    // Coordinate symmetry of the reduced form (the two roles differ in it).
    CHECK(green::potential_kernel_reduced(4, 1) ==
          doctest::Approx(green::potential_kernel_reduced(1, 4)).epsilon(1e-11));
}

TEST_CASE("three-dimensional resolvent, both evaluation routes") {
    // Frozen against an independent adaptive-quadrature evaluation of the
    // Bessel product integral.  lambda = 1/6 exercises the tensor route,
    // lambda = 0.005 the Bessel route.
    CHECK(green::green_resolvent(3, kE1_3, 1.0 / 6.0).value ==
          doctest::Approx(0.1936666486397).epsilon(1e-9));
    CHECK(green::green_resolvent(3, kOrigin3, 0.005).value ==
          doctest::Approx(1.431810538481).epsilon(1e-7));
    CHECK(green::green_resolvent(3, kE1_3, 0.005).value ==
          doctest::Approx(0.438969591174).epsilon(1e-7));
}

TEST_CASE("resolvent kernel against the walk-series oracle, d = 2") {
    const oracles::WalkDistribution dist(2, 60);
    for (double lambda : {1.0, 0.5}) {
        double tail = 0.0;
        const double series = oracles::series_green_resolvent(dist, kOrigin2, lambda, &tail);
        const auto quad = green::green_resolvent(2, kOrigin2, lambda);
        CHECK(std::abs(quad.value - series) < tail + 1e-9);
    }
}

TEST_CASE("generating kernel against the walk-series oracle, d = 2") {
    const oracles::WalkDistribution dist(2, 60);
    for (double s : {0.5, 0.8}) {
        double tail = 0.0;
        const double series = oracles::series_green_generating(dist, kE1_2, s, &tail);
        const auto quad = green::green_generating(2, kE1_2, s);
        CHECK(std::abs(quad.value - series) < tail + 1e-9);
    }
}

TEST_CASE("resolvent sums to 1/lambda over the lattice") {
    {  // d = 1, lambda = 0.5
        double total = 0.0;
        for (int x = -40; x <= 40; ++x) {
            const std::array<int, 1> xv{x};
            total += green::green_resolvent(1, xv, 0.5).value;
        }
        CHECK(total == doctest::Approx(2.0).epsilon(1e-6));
    }
    {  // d = 2, lambda = 0.7
        double total = 0.0;
        for (int x = -12; x <= 12; ++x)
            for (int y = -12; y <= 12; ++y) {
                const std::array<int, 2> xv{x, y};
                total += green::green_resolvent(2, xv, 0.7).value;
            }
        CHECK(total == doctest::Approx(1.0 / 0.7).epsilon(1e-4));
    }
}

TEST_CASE("planar resolvent log law") {
    double prev = 0.0;
    for (double lambda : {1e-6, 1e-7, 1e-8}) {
        const auto g = green::green_resolvent(2, kOrigin2, lambda);
        const double constant = kPi * g.value - std::log(1.0 / lambda);
        if (prev != 0.0) CHECK(std::abs(constant - prev) < 0.05);
        prev = constant;
        CHECK(g.est_error < 1e-10 * g.value);
    }
}

TEST_CASE("convention bridge identity") {
    Pcg32 rng(11, 0);
    for (int d = 1; d <= 3; ++d) {
        for (int trial = 0; trial < 5; ++trial) {
            const double s = 0.1 + 0.8 * rng.next_double();
            std::array<int, 3> x{};
            for (int j = 0; j < d; ++j) x[j] = static_cast<int>(rng.bounded(5)) - 2;
            const auto gen = green::green_generating(d, std::span(x.data(), d), s);
            const auto res = green::green_resolvent(d, std::span(x.data(), d), (1.0 - s) / s);
            const double tol = 1e-10 * std::max(1.0, std::abs(gen.value)) + gen.est_error +
                               res.est_error / s;
            CHECK(std::abs(gen.value - res.value / s) <= tol);
        }
    }
}

TEST_CASE("kernels are symmetric under reflections and permutations") {
    const std::array<int, 2> a{2, 1}, b{1, 2}, c{-2, 1}, e{2, -1};
    const double va = green::green_resolvent(2, a, 0.3).value;
    CHECK(green::green_resolvent(2, b, 0.3).value == doctest::Approx(va).epsilon(1e-10));
    CHECK(green::green_resolvent(2, c, 0.3).value == doctest::Approx(va).epsilon(1e-10));
    CHECK(green::green_resolvent(2, e, 0.3).value == doctest::Approx(va).epsilon(1e-10));
}

TEST_CASE("error kernel basics") {
    CHECK(green::error_kernel(kOrigin2, 1e-4) == 0.0);
    const double e4 = green::error_kernel(kE1_2, 1e-4);
    const double e5 = green::error_kernel(kE1_2, 1e-5);
    const double e6 = green::error_kernel(kE1_2, 1e-6);
    CHECK(e4 < 0.0);  // the defining integrand is nonpositive
    CHECK(std::abs(e4) > std::abs(e5));
    CHECK(std::abs(e5) > std::abs(e6));
}

TEST_CASE("error kernel closes the resolvent decomposition") {
    // G(x,lambda) = G(0,lambda) - a(x) - E(x,lambda)
    const double lambda = 1e-3;
    for (const auto x : {std::array<int, 2>{1, 0}, std::array<int, 2>{1, 1}}) {
        const double g0 = green::green_resolvent(2, kOrigin2, lambda).value;
        const double gx = green::green_resolvent(2, x, lambda).value;
        const double ax = green::potential_kernel(x).value;
        const double ex = green::error_kernel(x, lambda);
        CHECK(g0 - gx - ax == doctest::Approx(ex).epsilon(1e-7));
    }
}

TEST_CASE("first-passage transform closed form") {
    CHECK(green::hitting_transform_1d(2.0, 0.0) == doctest::Approx(1.0));
    // nu = 2, lambda = 0.01; the small-lambda law 1 - sqrt(lambda/nu) sits nearby.
    const double f = green::hitting_transform_1d(2.0, 0.01);
    CHECK(f == doctest::Approx(0.9317451415095755).epsilon(1e-9));
    CHECK(std::abs(f - (1.0 - std::sqrt(0.01 / 2.0))) < 0.003);
}

TEST_CASE("first-passage transform against Monte Carlo, including the convolution law") {
    const double nu = 2.0;      // per-neighbour rate of the rate-2nu walk
    const double lambda = 0.05;
    auto sample = [&](int start, Pcg32& rng) {
        double t = 0.0;
        int pos = start;
        while (pos != 0 && t < 400.0) {
            t += rng.exponential(2.0 * nu);
            pos += rng.bounded(2) ? 1 : -1;
        }
        return pos == 0 ? std::exp(-lambda * t) : 0.0;  // censored mass < e^{-20}
    };
    double sum1 = 0.0, sum2 = 0.0, sq1 = 0.0, sq2 = 0.0;
    const std::uint64_t n = 200000;
    for (std::uint64_t i = 0; i < n; ++i) {
        Pcg32 rng(314, i);
        const double v1 = sample(1, rng);
        const double v2 = sample(2, rng);
        sum1 += v1;
        sq1 += v1 * v1;
        sum2 += v2;
        sq2 += v2 * v2;
    }
    const double m1 = sum1 / n, m2 = sum2 / n;
    const double se1 = std::sqrt((sq1 / n - m1 * m1) / n);
    const double se2 = std::sqrt((sq2 / n - m2 * m2) / n);
    const double f = green::hitting_transform_1d(nu, lambda);
    CHECK(std::abs(m1 - f) < 3.0 * se1);
    CHECK(std::abs(m2 - f * f) < 3.0 * se2);  // passage from 2 = two independent legs
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS((void)green::green_resolvent(2, kOrigin2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)green::green_generating(2, kOrigin2, 1.0), std::invalid_argument);
    const std::array<int, 1> short_x{0};
    CHECK_THROWS_AS((void)green::green_resolvent(2, short_x, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)green::green_transient_discrete(2, kOrigin2), std::invalid_argument);
}
