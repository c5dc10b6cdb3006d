#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dormantwalk/params.hpp"

namespace dormantwalk::exact {

enum class Boundary { absorbing, reflecting };

/// Killed generator of the pair process restricted to the box ||z||_inf <= R,
/// stored row-compressed with explicit diagonal.  Absorbing boundaries keep
/// the outflow in the diagonal (lost mass, survival underestimated);
/// reflecting boundaries drop boundary-crossing rates entirely (survival
/// overestimated).  The killing term -gamma sits on the diagonal of (0,1).
struct TruncatedOperator {
    int d = 1;
    int radius = 1;
    Boundary boundary = Boundary::absorbing;
    std::size_t n_states = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;
    double uniformization_rate = 0.0;  ///< max |diagonal|
    std::size_t coincidence_index = 0; ///< index of (0,1)

    double row_sum(std::size_t row) const;
};

/// Builds the truncated operator.  Throws std::invalid_argument if the
/// estimated footprint exceeds `memory_budget_bytes` (the message carries
/// the attempted state count).
TruncatedOperator build_operator(const ModelParams& params, int radius, Boundary boundary,
                                 std::size_t memory_budget_bytes = std::size_t{4} << 30);

/// Survival bracketed by the two boundary treatments; columns share `times`.
struct SurvivalCurve {
    std::vector<double> times;
    std::vector<double> lower;  ///< absorbing
    std::vector<double> upper;  ///< reflecting
    double max_gap() const;
};

/// exp(t A) applied to the all-ones vector, read off at (0,1), for one
/// boundary treatment, via uniformization in time segments short enough for
/// the Poisson weights to stay in range.  Series truncation keeps the total
/// dropped mass below 1e-12 per segment.
std::vector<double> survival_one_boundary(const ModelParams& params, int radius,
                                          std::span<const double> times, Boundary boundary);

/// Evaluates both boundary operators over an ascending time grid.  If
/// `gap_tolerance` is positive and the bracketing gap exceeds it anywhere,
/// throws NonConvergenceError carrying the offending pair.
SurvivalCurve survival(const ModelParams& params, int radius, std::span<const double> times,
                       double gap_tolerance = 0.0);

struct LongTimeLimit {
    double value = 0.0;          ///< reflecting value at t_max (absorbing collapses once t >> R^2)
    double lower = 0.0;          ///< absorbing value at t_max
    double upper = 0.0;          ///< reflecting value at t_max
    double gap = 0.0;
    double stabilization = 0.0;  ///< |value(t_max) - value(t_max/2)|
    bool stabilized = false;
};

/// Long-time survival for d >= 3 with a stabilization check at t_max/2.
/// A failed check is flagged, never silently accepted.
LongTimeLimit long_time_limit(const ModelParams& params, int radius, double t_max,
                              double stabilization_tol = 1e-4);

/// E[L_t] via the gamma-derivative of survival at gamma = 0, computed as a
/// Richardson-extrapolated forward difference with step 1e-4.
double expected_exposure(const ModelParams& params, int radius, double t);

/// Survival of the plain killed walk (no dormancy layer): single activity
/// state, per-neighbour rate kappa+rho, killing gamma at the origin.  Kept
/// as a separate small solver so the s1 = 0 reduction is checked against
/// independent code.
std::vector<double> plain_killed_walk_survival(const ModelParams& params, int radius,
                                               std::span<const double> times, Boundary boundary);

}  // namespace dormantwalk::exact
