#include "dormantwalk/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dormantwalk::exact {

namespace {

// Poisson series per uniformization segment: Lambda * delta stays below this
// so exp(-Lambda*delta) never underflows; dropped tail mass < 1e-13/segment.
constexpr double kMaxSegmentMass = 330.0;
constexpr double kSegmentTailTol = 1e-13;

struct Box {
    int d;
    int radius;
    int side;
    std::size_t cells;

    explicit Box(int dim, int r)
        : d(dim), radius(r), side(2 * r + 1),
          cells(static_cast<std::size_t>(std::pow(side, dim))) {}

    std::size_t flatten(const int* z) const {
        std::size_t f = 0;
        for (int j = d - 1; j >= 0; --j) f = f * side + static_cast<std::size_t>(z[j] + radius);
        return f;
    }
    void unflatten(std::size_t f, int* z) const {
        for (int j = 0; j < d; ++j) {
            z[j] = static_cast<int>(f % side) - radius;
            f /= side;
        }
    }
};

std::size_t state_index(const Box& box, const int* z, int alpha) {
    return box.flatten(z) * 2 + static_cast<std::size_t>(alpha);
}

// y = (I + A/Lambda) x, CSR with explicit diagonal.
void apply_p(const TruncatedOperator& op, const std::vector<double>& x, std::vector<double>& y) {
    const double inv = 1.0 / op.uniformization_rate;
    for (std::size_t i = 0; i < op.n_states; ++i) {
        double acc = 0.0;
        for (std::int64_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k)
            acc += op.val[k] * x[op.col[k]];
        y[i] = x[i] + acc * inv;
    }
}

// w <- exp(dt A) w by segmented uniformization.
void propagate(const TruncatedOperator& op, double dt, std::vector<double>& w) {
    if (dt <= 0.0) return;
    const double lambda = op.uniformization_rate;
    if (lambda <= 0.0) return;  // generator is zero
    const int segments = std::max(1, static_cast<int>(std::ceil(lambda * dt / kMaxSegmentMass)));
    const double delta = dt / segments;
    const double q = lambda * delta;

    std::vector<double> u = w;
    std::vector<double> u_next(op.n_states);
    std::vector<double> acc(op.n_states);
    const int n_cap = static_cast<int>(q + 60.0 * std::sqrt(q) + 200.0);
    for (int s = 0; s < segments; ++s) {
        double weight = std::exp(-q);
        double cum = weight;
        for (std::size_t i = 0; i < op.n_states; ++i) {
            u[i] = w[i];
            acc[i] = weight * w[i];
        }
        for (int n = 1; cum < 1.0 - kSegmentTailTol && n <= n_cap; ++n) {
            apply_p(op, u, u_next);
            u.swap(u_next);
            weight *= q / n;
            cum += weight;
            for (std::size_t i = 0; i < op.n_states; ++i) acc[i] += weight * u[i];
        }
        w.swap(acc);
    }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double TruncatedOperator::row_sum(std::size_t row) const {
    double s = 0.0;
    for (std::int64_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k) s += val[k];
    return s;
}

TruncatedOperator build_operator(const ModelParams& params, int radius, Boundary boundary,
                                 std::size_t memory_budget_bytes) {
    params.validate();
    if (radius < 1) throw std::invalid_argument("build_operator: radius must be >= 1");
    const Box box(params.d, radius);
    const std::size_t n = box.cells * 2;
    const std::size_t nnz_bound = n * static_cast<std::size_t>(2 * params.d + 2);
    const std::size_t footprint = nnz_bound * 12 + n * 48;
    if (footprint > memory_budget_bytes)
        throw std::invalid_argument("build_operator: memory budget exceeded at " +
                                    std::to_string(n) + " states (needs about " +
                                    std::to_string(footprint >> 20) + " MiB)");

    TruncatedOperator op;
    op.d = params.d;
    op.radius = radius;
    op.boundary = boundary;
    op.n_states = n;
    op.row_ptr.reserve(n + 1);
    op.row_ptr.push_back(0);
    op.col.reserve(nnz_bound);
    op.val.reserve(nnz_bound);

    int zeros[5] = {0, 0, 0, 0, 0};
    op.coincidence_index = state_index(box, zeros, 1);

    int z[5];
    double max_diag = 0.0;
    for (std::size_t f = 0; f < box.cells; ++f) {
        box.unflatten(f, z);
        bool origin = true;
        for (int j = 0; j < params.d; ++j)
            if (z[j] != 0) origin = false;
        for (int alpha = 0; alpha <= 1; ++alpha) {
            const double per_neighbour = (alpha ? params.kappa : 0.0) + params.rho;
            double outflow = 0.0;
            const std::size_t diag_pos = op.val.size();
            op.col.push_back(static_cast<std::int32_t>(state_index(box, z, alpha)));
            op.val.push_back(0.0);  // diagonal placeholder
            for (int j = 0; j < params.d; ++j) {
                for (int sign : {-1, +1}) {
                    const int zj = z[j] + sign;
                    if (std::abs(zj) > radius) {
                        if (boundary == Boundary::absorbing) outflow += per_neighbour;
                        continue;  // reflecting: rate removed entirely
                    }
                    z[j] = zj;
                    op.col.push_back(static_cast<std::int32_t>(state_index(box, z, alpha)));
                    op.val.push_back(per_neighbour);
                    z[j] -= sign;
                    outflow += per_neighbour;
                }
            }
            const double flip =
                alpha == 1 ? (origin ? params.s1 : 0.0) : (origin ? 0.0 : params.s0);
            if (flip > 0.0) {
                op.col.push_back(static_cast<std::int32_t>(state_index(box, z, 1 - alpha)));
                op.val.push_back(flip);
                outflow += flip;
            }
            const double kill = (origin && alpha == 1) ? params.gamma : 0.0;
            op.val[diag_pos] = -(outflow + kill);
            max_diag = std::max(max_diag, outflow + kill);
            op.row_ptr.push_back(static_cast<std::int64_t>(op.val.size()));
        }
    }
    op.uniformization_rate = max_diag;
    return op;
}

std::vector<double> survival_one_boundary(const ModelParams& params, int radius,
                                          std::span<const double> times, Boundary boundary) {
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (times[i + 1] < times[i])
            throw std::invalid_argument("survival: times must be ascending");
    const TruncatedOperator op = build_operator(params, radius, boundary);
    std::vector<double> w(op.n_states, 1.0);
    std::vector<double> out;
    out.reserve(times.size());
    double t = 0.0;
    for (double target : times) {
        propagate(op, target - t, w);
        t = target;
        out.push_back(clamp01(w[op.coincidence_index]));
    }
    return out;
}

double SurvivalCurve::max_gap() const {
    double g = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) g = std::max(g, upper[i] - lower[i]);
    return g;
}

SurvivalCurve survival(const ModelParams& params, int radius, std::span<const double> times,
                       double gap_tolerance) {
    SurvivalCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.lower = survival_one_boundary(params, radius, times, Boundary::absorbing);
    curve.upper = survival_one_boundary(params, radius, times, Boundary::reflecting);
    if (gap_tolerance > 0.0) {
        const double g = curve.max_gap();
        if (g > gap_tolerance)
            throw NonConvergenceError(
                "survival: bracketing gap " + std::to_string(g) + " exceeds tolerance at radius " +
                    std::to_string(radius),
                g, gap_tolerance);
    }
    return curve;
}

LongTimeLimit long_time_limit(const ModelParams& params, int radius, double t_max,
                              double stabilization_tol) {
    if (params.d < 3) throw std::invalid_argument("long_time_limit: requires d >= 3");
    if (!(t_max > 0.0)) throw std::invalid_argument("long_time_limit: t_max must be > 0");
    const double grid[2] = {0.5 * t_max, t_max};
    const std::vector<double> upper =
        survival_one_boundary(params, radius, grid, Boundary::reflecting);
    const std::vector<double> lower =
        survival_one_boundary(params, radius, grid, Boundary::absorbing);
    LongTimeLimit out;
    out.value = upper[1];
    out.lower = lower[1];
    out.upper = upper[1];
    out.gap = upper[1] - lower[1];
    out.stabilization = std::abs(upper[1] - upper[0]);
    out.stabilized = out.stabilization < stabilization_tol;
    return out;
}

double expected_exposure(const ModelParams& params, int radius, double t) {
    params.validate();
    const double h = 1e-4;
    const double grid[1] = {t};
    ModelParams p = params;
    auto diff = [&](double gamma) {
        p.gamma = gamma;
        const std::vector<double> s =
            survival_one_boundary(p, radius, grid, Boundary::reflecting);
        return (1.0 - s[0]) / gamma;
    };
    // Richardson: (1 - S_h)/h has an O(h) bias with a known sign; 2 D(h) - D(2h)
    // cancels the leading term.
    return 2.0 * diff(h) - diff(2.0 * h);
}

std::vector<double> plain_killed_walk_survival(const ModelParams& params, int radius,
                                               std::span<const double> times, Boundary boundary) {
    // Self-contained reference solver for the walk without the dormancy
    // layer; deliberately does not reuse the TruncatedOperator machinery.
    params.validate();
    const Box box(params.d, radius);
    const std::size_t n = box.cells;
    const double nu = params.kappa + params.rho;

    // Neighbour table with -1 marking a boundary crossing.
    std::vector<std::int32_t> nbr(n * 2 * params.d);
    std::vector<double> diag(n, 0.0);
    int z[5];
    std::size_t origin_idx = 0;
    {
        int zeros[5] = {0, 0, 0, 0, 0};
        origin_idx = box.flatten(zeros);
    }
    for (std::size_t f = 0; f < n; ++f) {
        box.unflatten(f, z);
        double out_rate = 0.0;
        for (int j = 0; j < params.d; ++j) {
            for (int s = 0; s < 2; ++s) {
                const int sign = s ? 1 : -1;
                const int zj = z[j] + sign;
                std::int32_t target = -1;
                if (std::abs(zj) <= radius) {
                    z[j] = zj;
                    target = static_cast<std::int32_t>(box.flatten(z));
                    z[j] -= sign;
                    out_rate += nu;
                } else if (boundary == Boundary::absorbing) {
                    out_rate += nu;
                }
                nbr[f * 2 * params.d + 2 * j + s] = target;
            }
        }
        diag[f] = -out_rate;
    }
    diag[origin_idx] -= params.gamma;

    double lambda = 0.0;
    for (double dgg : diag) lambda = std::max(lambda, -dgg);

    std::vector<double> w(n, 1.0), u(n), u_next(n), acc(n);
    std::vector<double> out;
    out.reserve(times.size());
    double t_now = 0.0;
    for (double target : times) {
        double dt = target - t_now;
        t_now = target;
        if (dt > 0.0 && lambda > 0.0) {
            const int segments =
                std::max(1, static_cast<int>(std::ceil(lambda * dt / kMaxSegmentMass)));
            const double delta = dt / segments;
            const double q = lambda * delta;
            const int m_cap = static_cast<int>(q + 60.0 * std::sqrt(q) + 200.0);
            for (int s = 0; s < segments; ++s) {
                double weight = std::exp(-q);
                double cum = weight;
                for (std::size_t i = 0; i < n; ++i) {
                    u[i] = w[i];
                    acc[i] = weight * w[i];
                }
                for (int m = 1; cum < 1.0 - kSegmentTailTol && m <= m_cap; ++m) {
                    for (std::size_t i = 0; i < n; ++i) {
                        double s_off = 0.0;
                        const std::int32_t* row = &nbr[i * 2 * params.d];
                        for (int k = 0; k < 2 * params.d; ++k)
                            if (row[k] >= 0) s_off += u[row[k]];
                        u_next[i] = u[i] + (nu * s_off + diag[i] * u[i]) / lambda;
                    }
                    u.swap(u_next);
                    weight *= q / m;
                    cum += weight;
                    for (std::size_t i = 0; i < n; ++i) acc[i] += weight * u[i];
                }
                w.swap(acc);
            }
        }
        out.push_back(clamp01(w[origin_idx]));
    }
    return out;
}

}  // namespace dormantwalk::exact
