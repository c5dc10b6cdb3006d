#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "dormantwalk/exact.hpp"
#include "dormantwalk/model.hpp"
#include "dormantwalk/renewal.hpp"

using namespace dormantwalk;

namespace {

PairState make_state(std::initializer_list<int> z, int alpha) {
    PairState s;
    int j = 0;
    for (int v : z) s.z[j++] = v;
    s.alpha = static_cast<std::uint8_t>(alpha);
    return s;
}

}  // namespace

TEST_CASE("transition rates at the coincidence state") {
    ModelParams p;  // d=1, kappa=rho=s0=s1=1
    const auto rates = transition_rates(p, make_state({0}, 1));
    REQUIRE(rates.size() == 3);
    double total = 0.0, move = 0.0, flip = 0.0;
    for (const auto& [target, rate] : rates) {
        total += rate;
        if (target.alpha == 1) {
            CHECK(std::abs(target.z[0]) == 1);
            CHECK(rate == doctest::Approx(2.0));
            move += rate;
        } else {
            CHECK(target.z[0] == 0);
            flip = rate;
        }
    }
    CHECK(total == doctest::Approx(5.0));
    CHECK(move == doctest::Approx(4.0));
    CHECK(flip == doctest::Approx(1.0));
}

TEST_CASE("no wake-up on the trap") {
    ModelParams p;
    const auto rates = transition_rates(p, make_state({0}, 0));
    REQUIRE(rates.size() == 2);  // trap moves only
    for (const auto& [target, rate] : rates) {
        CHECK(target.alpha == 0);
        CHECK(rate == doctest::Approx(p.rho));
    }
}

TEST_CASE("wake-up away from the trap") {
    ModelParams p;
    p.s0 = 2.0;
    const auto rates = transition_rates(p, make_state({1}, 0));
    double flip = 0.0;
    int moves = 0;
    for (const auto& [target, rate] : rates) {
        if (target.alpha == 1) {
            flip = rate;
            CHECK(target.z[0] == 1);
        } else {
            ++moves;
            CHECK(rate == doctest::Approx(p.rho));
        }
    }
    CHECK(flip == doctest::Approx(2.0));
    CHECK(moves == 2 * p.d);
}

TEST_CASE("rate conservation over random states") {
    Pcg32 rng(2024, 0);
    for (int trial = 0; trial < 300; ++trial) {
        ModelParams p;
        p.d = 1 + static_cast<int>(rng.bounded(5));
        p.kappa = rng.next_double() * 2.0;
        p.rho = 0.2 + rng.next_double();
        p.s0 = 0.2 + rng.next_double();
        p.s1 = rng.next_double() * 2.0;
        PairState s;
        s.alpha = static_cast<std::uint8_t>(rng.bounded(2));
        for (int j = 0; j < p.d; ++j) s.z[j] = static_cast<int>(rng.bounded(5)) - 2;
        const auto rates = transition_rates(p, s);
        double total = 0.0;
        for (const auto& [t, r] : rates) total += r;
        CHECK(total == doctest::Approx(exit_rate(p, s)).epsilon(1e-13));
    }
}

TEST_CASE("dimension mismatch rejected") {
    ModelParams p;
    p.d = 2;
    PairState s = make_state({1, 0}, 1);
    s.z[3] = 2;  // beyond d
    CHECK_THROWS_AS((void)transition_rates(p, s), std::invalid_argument);
}

TEST_CASE("parameter validation names the violated invariant") {
    ModelParams p;
    p.rho = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "ModelParams: rho must be > 0", std::invalid_argument);
    p = ModelParams{};
    p.d = 6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("mu lies in (0,1] and equals one iff gamma vanishes") {
    ModelParams p;
    CHECK(p.mu() == doctest::Approx(5.0 / 6.0));
    p.gamma = 0.0;
    CHECK(p.mu() == 1.0);
}

TEST_CASE("zero horizon gives zero exposure") {
    ModelParams p;
    Pcg32 rng(1, 0);
    const auto oc = simulate_path(p, coincident_active_state(), 0.0, rng);
    CHECK(oc.exposure == 0.0);
    CHECK(oc.final_state.is_coincident_active(p.d));
}

TEST_CASE("exposure path never reads gamma") {
    ModelParams a, b;
    b.gamma = 7.5;
    for (std::uint64_t path = 0; path < 50; ++path) {
        Pcg32 r1(42, path), r2(42, path);
        const auto o1 = simulate_path(a, coincident_active_state(), 30.0, r1);
        const auto o2 = simulate_path(b, coincident_active_state(), 30.0, r2);
        CHECK(o1.exposure == o2.exposure);
    }
}

TEST_CASE("first holding at the coincidence state is exponential with the closed-form rate") {
    ModelParams p;
    const double s_rate = p.coincidence_exit_rate();  // 5
    const double h = 1.0 / s_rate;
    const std::uint64_t n = 100000;
    std::uint64_t stayed = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Pcg32 rng(777, i);
        const auto oc = simulate_path(p, coincident_active_state(), h, rng);
        if (oc.exposure == h) ++stayed;  // never left before the horizon
    }
    const double expect = std::exp(-1.0);
    const double freq = static_cast<double>(stayed) / n;
    const double se = std::sqrt(expect * (1.0 - expect) / n);
    CHECK(std::abs(freq - expect) < 3.0 * se);
}

TEST_CASE("mean exposure matches the solver derivative") {
    ModelParams p;  // d=1 canonical
    const double t = 50.0;
    const double reference = exact::expected_exposure(p, 300, t);
    const auto mc = estimate_mean_exposure(p, t, 100000, 2025);
    CHECK(std::abs(mc.mean - reference) < 3.0 * mc.std_error);
}

TEST_CASE("monte carlo survival agrees with the solver") {
    ModelParams p;
    const double times[1] = {20.0};
    const auto curve = exact::survival(p, 300, times);
    const auto mc = estimate_survival_exposure(p, times, 100000, 5150);
    CHECK(std::abs(mc[0].mean - curve.upper[0]) < 3.0 * mc[0].std_error + 1e-10);
}

TEST_CASE("exposure and hard-kill estimators agree") {
    ModelParams p;
    const double times[1] = {20.0};
    const auto soft = estimate_survival_exposure(p, times, 50000, 31);
    const auto hard = estimate_survival_hardkill(p, 20.0, 50000, 32);
    const double tol = 3.0 * std::hypot(soft[0].std_error, hard.std_error);
    CHECK(std::abs(soft[0].mean - hard.mean) < tol);
}

TEST_CASE("regeneration censoring vanishes with the horizon in recurrent dimensions") {
    ModelParams p;  // d=1
    const auto c2 = estimate_censored_fraction(p, 1e2, 20000, 8);
    const auto c3 = estimate_censored_fraction(p, 1e3, 20000, 8);
    const auto c4 = estimate_censored_fraction(p, 1e4, 20000, 8);
    CHECK(c2.fraction > c3.fraction);
    CHECK(c3.fraction > c4.fraction);
    CHECK(c4.fraction < 0.01);
}

TEST_CASE("censored regeneration values sit at the horizon") {
    ModelParams p;
    p.d = 3;
    Pcg32 rng(99, 5);
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_Z1(p, 50.0, rng);
        if (s.censored)
            CHECK(s.value == 50.0);
        else
            CHECK(s.value < 50.0);
    }
}

TEST_CASE("d3 censored fraction approximates the escape probability") {
    ModelParams p;
    p.d = 3;
    const auto esc = renewal::escape_probability_d3(p);
    // Horizon bias is bounded by a doubling comparison; the tail of the
    // conditional return time decays like t^{-1/2}, so the bias at T is at
    // most ~2.4x the (T, 2T) difference.
    const auto cens = estimate_censored_fraction(p, 2e3, 10000, 2027);
    const auto cens2 = estimate_censored_fraction(p, 4e3, 10000, 2028);
    const double horizon_bias = std::abs(cens.fraction - cens2.fraction) + 3.0 * cens2.std_error;
    CHECK(std::abs(cens.fraction - esc.value) < 3.0 * cens.std_error + 3.0 * horizon_bias);
}

TEST_CASE("reflection symmetry of the relative walk") {
    ModelParams p;
    std::uint64_t left = 0, right = 0;
    const std::uint64_t n = 20000;
    for (std::uint64_t i = 0; i < n; ++i) {
        Pcg32 rng(4242, i);
        const auto oc = simulate_path(p, coincident_active_state(), 25.0, rng);
        if (oc.final_state.z[0] > 0) ++right;
        if (oc.final_state.z[0] < 0) ++left;
    }
    const double diff = (static_cast<double>(right) - static_cast<double>(left)) / n;
    const double se = std::sqrt(0.5 / static_cast<double>(n));
    CHECK(std::abs(diff) < 3.0 * se);
}

TEST_CASE("frozen dormancy cannot reactivate when s1 is zero") {
    ModelParams p;
    p.s1 = 0.0;
    Pcg32 rng(3, 1);
    const auto oc = simulate_path(p, coincident_active_state(), 100.0, rng);
    CHECK(oc.final_state.alpha == 1);
}

TEST_CASE("estimates are reproducible and thread-count independent") {
    ModelParams p;
    const double times[2] = {5.0, 15.0};
    setenv("DORMANTWALK_THREADS", "4", 1);
    const auto a = estimate_survival_exposure(p, times, 20000, 777);
    setenv("DORMANTWALK_THREADS", "1", 1);
    const auto b = estimate_survival_exposure(p, times, 20000, 777);
    unsetenv("DORMANTWALK_THREADS");
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a[i].mean == b[i].mean);
        CHECK(a[i].std_error == b[i].std_error);
    }
}

TEST_CASE("gamma zero keeps every path alive") {
    ModelParams p;
    p.gamma = 0.0;
    const double times[1] = {10.0};
    const auto soft = estimate_survival_exposure(p, times, 1000, 1);
    CHECK(soft[0].mean == 1.0);
    const auto hard = estimate_survival_hardkill(p, 10.0, 1000, 2);
    CHECK(hard.mean == 1.0);
}
