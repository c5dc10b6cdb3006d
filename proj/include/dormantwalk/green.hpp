#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dormantwalk/params.hpp"

namespace dormantwalk::green {

/// The two kernel conventions in circulation.  `resolvent` integrates
/// e^{ikx}/(lambda + 1 - phi(k)) over the Brillouin box; `generating` is the
/// step-weighted series sum_n s^n P(X_n = x), i.e. e^{ikx}/(1 - s phi(k)).
/// They are linked by generating(x, s) = resolvent(x, (1-s)/s) / s.
enum class Convention { resolvent, generating };

struct GreenValue {
    int dim = 0;
    Convention convention = Convention::resolvent;
    std::array<int, 5> x{};
    double parameter = 0.0;  ///< lambda (resolvent) or s (generating)
    double value = 0.0;
    double est_error = 0.0;  ///< change at the last node doubling, plus any tail bound
};

struct PotentialKernelValue {
    std::array<int, 2> x{};
    double value = 0.0;
    double est_error = 0.0;
};

/// phi(k) = (1/d) sum_j cos(k_j), the single-step structure function.
double structure_function(std::span<const double> k);

/// Resolvent-convention kernel, lambda > 0.  Tensor Gauss-Legendre over the
/// Brillouin box with panels graded dyadically toward k = 0 and per-panel
/// order doubling until the relative change drops below 1e-10 (d <= 3).
/// For d >= 4 the Brillouin tensor grid is no longer affordable and the
/// evaluation switches to the Bessel product integral along the diagonal.
GreenValue green_resolvent(int d, std::span<const int> x, double lambda);

/// Generating-convention kernel at s in (0,1); same quadrature scheme
/// applied to 1/(1 - s phi(k)) for d <= 3, bridge form for d >= 4.
GreenValue green_generating(int d, std::span<const int> x, double s);

/// Two-dimensional potential kernel a(x) = int (1 - cos kx)/(1 - phi(k)).
/// a(0) = 0, a(e1) = 1, discrete-harmonic away from the origin.
PotentialKernelValue potential_kernel(std::span<const int> x);

/// a(x) again, but reduced to a single integral over [0, pi] by contour
/// integration in k1.  Used where many evaluations at scattered lattice
/// points are needed; agrees with potential_kernel to quadrature accuracy.
double potential_kernel_reduced(int x1, int x2);

/// E(x, lambda) = int (1 - cos kx) (1/(1+lambda-phi) - 1/(1-phi)), d = 2.
/// Nonpositive, vanishes at x = 0 and as lambda -> 0.
double error_kernel(std::span<const int> x, double lambda);

/// Expected number of visits to x of the discrete-time simple random walk,
/// d >= 3: sum_n P(X_n = x).  Evaluated as d * int_0^inf prod_j
/// e^{-t} I_{x_j}(t) dt with the modified-Bessel factors from a power
/// series for small t and the large-argument asymptotic series beyond; the
/// integral tail past the numeric cutoff is summed analytically from the
/// same asymptotic expansion with an explicit bound.
double green_transient_discrete(int d, std::span<const int> x);

/// Expected occupation time of x for the continuous-time walk with total
/// jump rate 2d: the discrete value divided by 2d.
double green_transient_occupation(int d, std::span<const int> x);

/// Laplace transform E[e^{-lambda R}] of the first passage time from e1 to
/// the origin of the one-dimensional walk with total jump rate 2*nu:
/// ((lambda+2nu) - sqrt((lambda+2nu)^2 - 4nu^2)) / (2nu).
double hitting_transform_1d(double nu, double lambda);

/// Scaled modified Bessel function e^{-t} I_m(t); exposed for tests.
double scaled_bessel_i(int m, double t);

/// CSV line set for the tabulation interface: header plus one row per value,
/// columns (dim, convention, x, parameter, value, est_error).
std::string tabulate_csv(std::span<const GreenValue> values);

}  // namespace dormantwalk::green
