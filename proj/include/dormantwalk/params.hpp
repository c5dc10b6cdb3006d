#pragma once

#include <stdexcept>
#include <string>

namespace dormantwalk {

/// Rate parameters of the trapped walk with responsive dormancy.
///
/// All jump rates are per neighbour: the active pair walk moves to each of
/// its 2d neighbours at rate kappa+rho, the trap alone contributes rho per
/// neighbour.  Totals quoted elsewhere are always 2d times these values.
struct ModelParams {
    int d = 1;           ///< lattice dimension, 1..5
    double kappa = 1.0;  ///< per-neighbour jump rate of the walker while active
    double rho = 1.0;    ///< per-neighbour jump rate of the trap
    double gamma = 1.0;  ///< killing rate while walker and trap coincide (active)
    double s0 = 1.0;     ///< wake-up rate (dormant -> active, away from the trap)
    double s1 = 1.0;     ///< dormancy rate (active -> dormant, on the trap)

    /// Total exit rate out of the coincidence state (z=0, active), killing excluded.
    double coincidence_exit_rate() const { return 2.0 * d * (kappa + rho) + s1; }

    /// Per-visit survival weight mu = M/(M+gamma), M the coincidence exit rate.
    /// Equals 1 iff gamma = 0.
    double mu() const {
        const double m = coincidence_exit_rate();
        return m / (m + gamma);
    }

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const {
        if (d < 1 || d > 5) throw std::invalid_argument("ModelParams: d must be in {1,...,5}, got " + std::to_string(d));
        if (!(kappa >= 0.0)) throw std::invalid_argument("ModelParams: kappa must be >= 0");
        if (!(rho > 0.0)) throw std::invalid_argument("ModelParams: rho must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
        if (!(s0 > 0.0)) throw std::invalid_argument("ModelParams: s0 must be > 0");
        if (!(s1 >= 0.0)) throw std::invalid_argument("ModelParams: s1 must be >= 0");
    }
};

/// Thrown when an iterative numerical scheme fails to reach its tolerance.
/// Carries the last two iterates so callers can report how close it got.
class NonConvergenceError : public std::runtime_error {
  public:
    NonConvergenceError(const std::string& what, double previous, double last)
        : std::runtime_error(what), previous_value(previous), last_value(last) {}
    double previous_value;
    double last_value;
};

}  // namespace dormantwalk
