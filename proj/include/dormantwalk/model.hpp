#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dormantwalk/params.hpp"
#include "dormantwalk/rng.hpp"
#include "dormantwalk/stats.hpp"

namespace dormantwalk {

/// State of the relative pair process: z = walker minus trap, alpha the
/// activity flag (1 active, 0 dormant).  Only the first d components of z
/// are meaningful.
struct PairState {
    std::array<std::int32_t, 5> z{};
    std::uint8_t alpha = 1;

    bool at_origin(int d) const {
        for (int j = 0; j < d; ++j)
            if (z[j] != 0) return false;
        return true;
    }
    bool is_coincident_active(int d) const { return alpha == 1 && at_origin(d); }
};

inline PairState coincident_active_state() { return PairState{}; }

/// Outcome of one sampled trajectory.
struct TrajectoryOutcome {
    double exposure = 0.0;              ///< time spent at (0,1) up to the horizon
    std::optional<bool> survived;       ///< set in hard-kill mode only
    PairState final_state;
};

/// One sampled inter-arrival time between visits to (0,1).
struct RegenerationSample {
    double value = 0.0;   ///< return time, or the horizon when censored
    bool censored = false;
};

enum class KillMode {
    exposure,   ///< gamma never sampled; exposure recorded for exp(-gamma L) weighting
    hard_kill,  ///< Bernoulli killing at rate gamma while at (0,1)
};

/// All enabled transitions out of `state` with their rates.  Lattice moves
/// change one coordinate by +-1 at per-neighbour rate (alpha*kappa + rho);
/// switch moves flip alpha in place: rate s1 at (0,1), rate s0 at (z!=0, 0).
/// Throws std::invalid_argument if a coordinate beyond params.d is nonzero.
std::vector<std::pair<PairState, double>> transition_rates(const ModelParams& params,
                                                           const PairState& state);

/// Total exit rate out of `state` (closed form; killing excluded).
double exit_rate(const ModelParams& params, const PairState& state);

/// Event-driven simulation of the pair process up to `horizon`.
/// In exposure mode the path law does not depend on gamma.  In hard-kill
/// mode an additional kill clock at rate gamma runs while at (0,1); on a
/// kill the path stops and `survived` is false.
TrajectoryOutcome simulate_path(const ModelParams& params, const PairState& start, double horizon,
                                Pcg32& rng, KillMode mode = KillMode::exposure);

/// Exposure L_t recorded at each checkpoint of an ascending time grid, one
/// pass over a single path started at `start`.
void simulate_exposure_grid(const ModelParams& params, const PairState& start,
                            std::span<const double> times, Pcg32& rng,
                            std::span<double> exposures_out);

/// Samples the first return time to (0,1) starting from (0,1), censored at
/// `horizon`.
RegenerationSample sample_Z1(const ModelParams& params, double horizon, Pcg32& rng);

/// exp(-gamma L_t) averaged over `paths` independent trajectories from
/// (0,1), one estimate per grid time.  Deterministic for fixed seed
/// regardless of the worker count.
std::vector<SurvivalEstimate> estimate_survival_exposure(const ModelParams& params,
                                                         std::span<const double> times,
                                                         std::uint64_t paths, std::uint64_t seed);

/// Survival frequency under hard killing at a single horizon.
SurvivalEstimate estimate_survival_hardkill(const ModelParams& params, double t,
                                            std::uint64_t paths, std::uint64_t seed);

/// Mean exposure E[L_t] across `paths` trajectories.
SurvivalEstimate estimate_mean_exposure(const ModelParams& params, double t, std::uint64_t paths,
                                        std::uint64_t seed);

struct CensoredFraction {
    double fraction = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Fraction of regeneration samples censored at `horizon`.
CensoredFraction estimate_censored_fraction(const ModelParams& params, double horizon,
                                            std::uint64_t samples, std::uint64_t seed);

/// Mean of exp(-lambda Z1) over censored regeneration samples; censored
/// draws contribute exp(-lambda horizon) at most e^{-lambda*horizon}, and
/// are counted as zero (downward bias at most censored_fraction *
/// exp(-lambda*horizon)).
SurvivalEstimate estimate_z1_laplace(const ModelParams& params, double lambda, double horizon,
                                     std::uint64_t samples, std::uint64_t seed);

}  // namespace dormantwalk
