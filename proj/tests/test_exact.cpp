#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "dormantwalk/exact.hpp"
#include "dormantwalk/model.hpp"

using namespace dormantwalk;
namespace exact = dormantwalk::exact;

TEST_CASE("operator row at the coincidence state") {
    ModelParams p;  // d=1 canonical
    const auto op = exact::build_operator(p, 5, exact::Boundary::reflecting);
    const std::size_t row = op.coincidence_index;
    double diag = 0.0, moves = 0.0, flip = 0.0;
    for (std::int64_t k = op.row_ptr[row]; k < op.row_ptr[row + 1]; ++k) {
        if (static_cast<std::size_t>(op.col[k]) == row) diag = op.val[k];
        else if (op.col[k] % 2 == 1) moves += op.val[k];  // active neighbours
        else flip = op.val[k];
    }
    CHECK(diag == doctest::Approx(-(2.0 * (p.kappa + p.rho) + p.s1 + p.gamma)));
    CHECK(moves == doctest::Approx(2.0 * (p.kappa + p.rho)));
    CHECK(flip == doctest::Approx(p.s1));
    CHECK(op.row_sum(row) == doctest::Approx(-p.gamma));
}

TEST_CASE("reflecting generator is conservative without killing") {
    ModelParams p;
    p.gamma = 0.0;
    const auto op = exact::build_operator(p, 4, exact::Boundary::reflecting);
    for (std::size_t row = 0; row < op.n_states; ++row)
        CHECK(std::abs(op.row_sum(row)) < 1e-12);
}

TEST_CASE("state count and boundary rows") {
    ModelParams p;
    p.d = 2;
    const int radius = 3;
    const auto abs_op = exact::build_operator(p, radius, exact::Boundary::absorbing);
    const auto ref_op = exact::build_operator(p, radius, exact::Boundary::reflecting);
    CHECK(abs_op.n_states == 2u * 7u * 7u);

    // Interior rows coincide; only boundary rows differ.
    const int side = 2 * radius + 1;
    for (int x = -radius; x <= radius; ++x)
        for (int y = -radius; y <= radius; ++y)
            for (int alpha = 0; alpha <= 1; ++alpha) {
                const std::size_t cell =
                    static_cast<std::size_t>((y + radius) * side + (x + radius));
                const std::size_t row = cell * 2 + static_cast<std::size_t>(alpha);
                const bool boundary = std::abs(x) == radius || std::abs(y) == radius;
                const bool same_sums =
                    std::abs(abs_op.row_sum(row) - ref_op.row_sum(row)) < 1e-12;
                if (boundary)
                    CHECK_FALSE(same_sums);
                else
                    CHECK(same_sums);
            }
}

TEST_CASE("memory budget rejection reports the state count") {
    ModelParams p;
    p.d = 5;
    try {
        (void)exact::build_operator(p, 40, exact::Boundary::absorbing);
        FAIL("expected memory budget rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("states") != std::string::npos);
    }
}

TEST_CASE("survival curve starts at one and brackets monotonically") {
    ModelParams p;
    const std::array<double, 4> times{0.0, 5.0, 10.0, 30.0};
    const auto curve = exact::survival(p, 120, times);
    CHECK(curve.lower[0] == 1.0);
    CHECK(curve.upper[0] == 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(curve.lower[i] >= 0.0);
        CHECK(curve.upper[i] <= 1.0);
        CHECK(curve.lower[i] <= curve.upper[i] + 1e-12);
        if (i > 0) {
            CHECK(curve.lower[i] <= curve.lower[i - 1] + 1e-12);
            CHECK(curve.upper[i] <= curve.upper[i - 1] + 1e-12);
        }
    }
}

TEST_CASE("short-time slope equals the killing rate") {
    ModelParams p;
    p.gamma = 1.0;
    const std::array<double, 2> deltas{1e-4, 1e-3};
    const auto curve = exact::survival(p, 20, deltas);
    const double slope_fine = (1.0 - curve.upper[0]) / deltas[0];
    const double slope_coarse = (1.0 - curve.upper[1]) / deltas[1];
    CHECK(std::abs(slope_fine - p.gamma) < 2e-3);
    CHECK(std::abs(slope_coarse - p.gamma) < 2e-2);
    CHECK(std::abs(slope_fine - p.gamma) < std::abs(slope_coarse - p.gamma));
}

TEST_CASE("bracketing gap shrinks as the radius doubles") {
    ModelParams p;
    const std::array<double, 1> t{30.0};
    const auto small = exact::survival(p, 20, t);
    const auto large = exact::survival(p, 40, t);
    CHECK(small.max_gap() > large.max_gap());
    CHECK(large.max_gap() < 1e-3);
}

TEST_CASE("gap tolerance violations are reported, not silently accepted") {
    ModelParams p;
    const std::array<double, 1> t{50.0};
    CHECK_THROWS_AS((void)exact::survival(p, 6, t, 1e-9), NonConvergenceError);
}

TEST_CASE("survival decreases when the killing rate doubles") {
    ModelParams p;
    ModelParams q = p;
    q.gamma = 2.0;
    const std::array<double, 3> times{5.0, 15.0, 40.0};
    const auto a = exact::survival(p, 120, times);
    const auto b = exact::survival(q, 120, times);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(b.upper[i] < a.upper[i]);
}

TEST_CASE("no-dormancy reduction matches the independent plain solver") {
    ModelParams p;
    p.s1 = 0.0;
    const std::array<double, 3> times{10.0, 20.0, 50.0};
    for (const auto boundary : {exact::Boundary::absorbing, exact::Boundary::reflecting}) {
        const auto full = exact::survival_one_boundary(p, 300, times, boundary);
        const auto plain = exact::plain_killed_walk_survival(p, 300, times, boundary);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK(std::abs(full[i] - plain[i]) <= 1e-10);
    }
}

TEST_CASE("times must be ascending") {
    ModelParams p;
    const std::array<double, 2> bad{10.0, 5.0};
    CHECK_THROWS_AS((void)exact::survival(p, 20, bad), std::invalid_argument);
}

TEST_CASE("long-time limit without killing is one") {
    ModelParams p;
    p.d = 3;
    p.gamma = 0.0;
    const auto lt = exact::long_time_limit(p, 8, 40.0);
    CHECK(std::abs(lt.value - 1.0) < 1e-10);
    CHECK(lt.stabilized);
}

TEST_CASE("long-time limit flags non-stabilized runs") {
    ModelParams p;  // d=1 decays like 1/sqrt(t): never stabilizes
    p.d = 1;
    CHECK_THROWS_AS((void)exact::long_time_limit(p, 50, 20.0), std::invalid_argument);
    p.d = 3;
    const auto lt = exact::long_time_limit(p, 10, 6.0, 1e-9);
    CHECK_FALSE(lt.stabilized);  // far from settled at t = 6
    CHECK(lt.stabilization > 1e-9);
}

TEST_CASE("exposure accumulator is consistent between boundaries at large radius") {
    ModelParams p;
    const double e1 = exact::expected_exposure(p, 200, 20.0);
    const double e2 = exact::expected_exposure(p, 300, 20.0);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
    CHECK(e1 > 0.0);
}
