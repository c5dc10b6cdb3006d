#include "dormantwalk/model.hpp"

#include <cmath>

#include "dormantwalk/threads.hpp"

namespace dormantwalk {

namespace {

void check_state(const ModelParams& params, const PairState& state) {
    for (int j = params.d; j < 5; ++j)
        if (state.z[j] != 0)
            throw std::invalid_argument("PairState has a nonzero coordinate beyond dimension d");
}

// Switch rate at (z, alpha): s1 only at the active coincidence state, s0 only
// for a dormant walker away from the trap.  No wake-up on the trap.
double switch_rate(const ModelParams& params, bool at_origin, std::uint8_t alpha) {
    if (alpha == 1) return at_origin ? params.s1 : 0.0;
    return at_origin ? 0.0 : params.s0;
}

struct EventSampler {
    explicit EventSampler(const ModelParams& p) : params(p), two_d(2 * p.d) {}

    const ModelParams& params;
    int two_d;

    // Advances `state` by one event and returns the holding time that
    // elapsed before it.  `out_was_coincident` reports whether the holding
    // interval was spent at (0,1).
    double step(PairState& state, Pcg32& rng, bool& out_was_coincident) {
        const bool origin = state.at_origin(params.d);
        const double per_neighbour = (state.alpha ? params.kappa : 0.0) + params.rho;
        const double move_rate = two_d * per_neighbour;
        const double flip_rate = switch_rate(params, origin, state.alpha);
        const double total = move_rate + flip_rate;
        out_was_coincident = origin && state.alpha == 1;

        const double hold = rng.exponential(total);
        if (flip_rate > 0.0 && rng.next_double() * total < flip_rate) {
            state.alpha ^= 1;
        } else {
            const std::uint32_t dir = rng.bounded(static_cast<std::uint32_t>(two_d));
            const int axis = static_cast<int>(dir >> 1);
            state.z[axis] += (dir & 1) ? 1 : -1;
        }
        return hold;
    }
};

// Deterministic chunked Monte Carlo: path i always uses stream i of the
// master seed, chunk results merge in index order.
constexpr std::uint64_t kChunkSize = 4096;

template <typename PerPath>
RunningStats run_chunked(std::uint64_t paths, std::uint64_t seed, PerPath per_path) {
    const std::uint64_t chunks = (paths + kChunkSize - 1) / kChunkSize;
    std::vector<RunningStats> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunkSize;
        const std::uint64_t end = std::min(paths, begin + kChunkSize);
        RunningStats acc;
        for (std::uint64_t i = begin; i < end; ++i) {
            Pcg32 rng(seed, i);
            acc.add(per_path(rng));
        }
        partial[c] = acc;
    });
    RunningStats total;
    for (const auto& part : partial) total.merge(part);
    return total;
}

}  // namespace

double exit_rate(const ModelParams& params, const PairState& state) {
    const bool origin = state.at_origin(params.d);
    const double per_neighbour = (state.alpha ? params.kappa : 0.0) + params.rho;
    return 2.0 * params.d * per_neighbour + switch_rate(params, origin, state.alpha);
}

std::vector<std::pair<PairState, double>> transition_rates(const ModelParams& params,
                                                           const PairState& state) {
    params.validate();
    check_state(params, state);
    std::vector<std::pair<PairState, double>> out;
    out.reserve(2 * params.d + 1);
    const double per_neighbour = (state.alpha ? params.kappa : 0.0) + params.rho;
    for (int j = 0; j < params.d; ++j) {
        for (int sign : {-1, +1}) {
            PairState target = state;
            target.z[j] += sign;
            out.emplace_back(target, per_neighbour);
        }
    }
    const double flip = switch_rate(params, state.at_origin(params.d), state.alpha);
    if (flip > 0.0) {
        PairState target = state;
        target.alpha ^= 1;
        out.emplace_back(target, flip);
    }
    return out;
}

TrajectoryOutcome simulate_path(const ModelParams& params, const PairState& start, double horizon,
                                Pcg32& rng, KillMode mode) {
    EventSampler sampler(params);
    PairState state = start;
    TrajectoryOutcome outcome;
    double t = 0.0;

    if (mode == KillMode::exposure) {
        while (t < horizon) {
            bool coincident = false;
            PairState next = state;
            const double hold = sampler.step(next, rng, coincident);
            if (t + hold >= horizon) {
                if (coincident) outcome.exposure += horizon - t;
                t = horizon;
                break;
            }
            if (coincident) outcome.exposure += hold;
            t += hold;
            state = next;
        }
        outcome.final_state = state;
        return outcome;
    }

    // Hard kill: while at (0,1) the kill clock at rate gamma competes with
    // the exit clock.
    outcome.survived = true;
    while (t < horizon) {
        const bool coincident = state.is_coincident_active(params.d);
        if (coincident && params.gamma > 0.0) {
            const double exit = exit_rate(params, state);
            const double total = exit + params.gamma;
            const double hold = rng.exponential(total);
            if (t + hold >= horizon) {
                outcome.exposure += horizon - t;
                t = horizon;
                break;
            }
            outcome.exposure += hold;
            t += hold;
            if (rng.next_double() * total < params.gamma) {
                outcome.survived = false;
                break;
            }
            // Exit event: move or switch with the usual proportions.
            const double flip = params.s1;
            if (rng.next_double() * exit < flip) {
                state.alpha = 0;
            } else {
                const std::uint32_t dir = rng.bounded(static_cast<std::uint32_t>(2 * params.d));
                state.z[dir >> 1] += (dir & 1) ? 1 : -1;
            }
        } else {
            bool was_coincident = false;
            PairState next = state;
            const double hold = sampler.step(next, rng, was_coincident);
            if (t + hold >= horizon) {
                t = horizon;
                break;
            }
            t += hold;
            state = next;
        }
    }
    outcome.final_state = state;
    return outcome;
}

void simulate_exposure_grid(const ModelParams& params, const PairState& start,
                            std::span<const double> times, Pcg32& rng,
                            std::span<double> exposures_out) {
    EventSampler sampler(params);
    PairState state = start;
    double t = 0.0;
    double exposure = 0.0;
    std::size_t next_cp = 0;
    const double horizon = times.empty() ? 0.0 : times.back();

    while (next_cp < times.size()) {
        bool coincident = false;
        PairState next = state;
        const double hold = sampler.step(next, rng, coincident);
        const double t_event = t + hold;
        while (next_cp < times.size() && times[next_cp] <= t_event) {
            exposures_out[next_cp] = exposure + (coincident ? times[next_cp] - t : 0.0);
            ++next_cp;
        }
        if (t_event >= horizon) break;
        if (coincident) exposure += hold;
        t = t_event;
        state = next;
    }
}

RegenerationSample sample_Z1(const ModelParams& params, double horizon, Pcg32& rng) {
    EventSampler sampler(params);
    PairState state = coincident_active_state();
    double t = 0.0;

    // First event leaves (0,1); afterwards run until re-entry or censoring.
    bool coincident = false;
    t += sampler.step(state, rng, coincident);
    while (t < horizon && !state.is_coincident_active(params.d)) {
        t += sampler.step(state, rng, coincident);
    }
    if (t >= horizon) return RegenerationSample{horizon, true};
    return RegenerationSample{t, false};
}

std::vector<SurvivalEstimate> estimate_survival_exposure(const ModelParams& params,
                                                         std::span<const double> times,
                                                         std::uint64_t paths, std::uint64_t seed) {
    params.validate();
    const std::uint64_t chunks = (paths + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<RunningStats>> partial(chunks,
                                                   std::vector<RunningStats>(times.size()));
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunkSize;
        const std::uint64_t end = std::min(paths, begin + kChunkSize);
        std::vector<double> exposures(times.size());
        for (std::uint64_t i = begin; i < end; ++i) {
            Pcg32 rng(seed, i);
            simulate_exposure_grid(params, coincident_active_state(), times, rng, exposures);
            for (std::size_t k = 0; k < times.size(); ++k)
                partial[c][k].add(std::exp(-params.gamma * exposures[k]));
        }
    });
    std::vector<SurvivalEstimate> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        RunningStats total;
        for (std::uint64_t c = 0; c < chunks; ++c) total.merge(partial[c][k]);
        out[k] = SurvivalEstimate{times[k], total.mean(), total.std_error(), paths, seed};
    }
    return out;
}

SurvivalEstimate estimate_survival_hardkill(const ModelParams& params, double t,
                                            std::uint64_t paths, std::uint64_t seed) {
    params.validate();
    const RunningStats total = run_chunked(paths, seed, [&](Pcg32& rng) {
        const TrajectoryOutcome oc =
            simulate_path(params, coincident_active_state(), t, rng, KillMode::hard_kill);
        return (oc.survived && *oc.survived) ? 1.0 : 0.0;
    });
    return SurvivalEstimate{t, total.mean(), total.std_error(), paths, seed};
}

SurvivalEstimate estimate_mean_exposure(const ModelParams& params, double t, std::uint64_t paths,
                                        std::uint64_t seed) {
    params.validate();
    const RunningStats total = run_chunked(paths, seed, [&](Pcg32& rng) {
        return simulate_path(params, coincident_active_state(), t, rng).exposure;
    });
    return SurvivalEstimate{t, total.mean(), total.std_error(), paths, seed};
}

CensoredFraction estimate_censored_fraction(const ModelParams& params, double horizon,
                                            std::uint64_t samples, std::uint64_t seed) {
    params.validate();
    const RunningStats total = run_chunked(samples, seed, [&](Pcg32& rng) {
        return sample_Z1(params, horizon, rng).censored ? 1.0 : 0.0;
    });
    return CensoredFraction{total.mean(), total.std_error(), samples};
}

SurvivalEstimate estimate_z1_laplace(const ModelParams& params, double lambda, double horizon,
                                     std::uint64_t samples, std::uint64_t seed) {
    params.validate();
    const RunningStats total = run_chunked(samples, seed, [&](Pcg32& rng) {
        const RegenerationSample s = sample_Z1(params, horizon, rng);
        return s.censored ? 0.0 : std::exp(-lambda * s.value);
    });
    return SurvivalEstimate{horizon, total.mean(), total.std_error(), samples, seed};
}

}  // namespace dormantwalk
