#include "dormantwalk/asymptotics.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "dormantwalk/green.hpp"
#include "dormantwalk/renewal.hpp"

namespace dormantwalk::asympt {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<int, 5> origin{};
const std::array<int, 5> e1{1, 0, 0, 0, 0};

double evaluate_at(int d, double prefactor, double t) {
    return d == 1 ? prefactor / std::sqrt(kPi * t) : prefactor / std::log(t);
}

AsymptoticReport none_baseline(const ModelParams& params, std::optional<double> t) {
    AsymptoticReport rep;
    rep.d = params.d;
    rep.model = DormancyModel::none;
    const double nu = params.rho + params.kappa;
    if (params.d == 1) {
        rep.leading_value = 2.0 * std::sqrt(nu) / params.gamma;
    } else if (params.d == 2) {
        rep.leading_value = 4.0 * kPi * nu / params.gamma;
    } else {
        const double g0 = green::green_transient_occupation(params.d, std::span(origin.data(), params.d));
        rep.green_occupation_origin = g0;
        rep.leading_value = 1.0 - params.gamma * g0 / (nu + params.gamma * g0);
    }
    if (t && params.d <= 2) rep.value_at_t = evaluate_at(params.d, rep.leading_value, *t);
    return rep;
}

}  // namespace

AsymptoticReport responsive_asymptotic(const ModelParams& params, std::optional<double> t) {
    params.validate();
    if (!(params.gamma > 0.0))
        throw std::invalid_argument("responsive_asymptotic: requires gamma > 0");
    if (params.s1 == 0.0) {
        // No dormancy: identical expression to the plain baseline.
        AsymptoticReport rep = none_baseline(params, t);
        rep.model = DormancyModel::responsive;
        return rep;
    }

    AsymptoticReport rep;
    rep.d = params.d;
    rep.model = DormancyModel::responsive;
    const double nu = params.kappa + params.rho;

    if (params.d == 1) {
        const double root = std::sqrt(params.s1 * params.s1 + 4.0 * params.rho * params.s1);
        rep.d1_constant_bare = 1.0 / (std::sqrt(nu) * (root - params.s1));
        rep.d1_constant_rho_weighted = params.rho * rep.d1_constant_bare;
        rep.prefactor_bare = 2.0 * (std::sqrt(nu) + params.s1 * rep.d1_constant_bare) / params.gamma;
        rep.prefactor_rho_weighted =
            2.0 * (std::sqrt(nu) + params.s1 * rep.d1_constant_rho_weighted) / params.gamma;
        rep.leading_value = rep.prefactor_rho_weighted;
    } else if (params.d == 2) {
        const renewal::GeometricClock clock = renewal::make_clock(params);
        const auto g0 = green::green_generating(2, std::span(origin.data(), 2), clock.continuation);
        const auto ge = green::green_generating(2, std::span(e1.data(), 2), clock.continuation);
        const auto gres1 = green::green_resolvent(2, std::span(origin.data(), 2), 1.0);
        rep.c2_generating_ratio = kPi * g0.value / (g0.value - ge.value);
        rep.c2_mixed_literal = kPi * g0.value / (gres1.value + ge.value);
        rep.prefactor_c2_ratio =
            (4.0 * nu * kPi + params.s1 * rep.c2_generating_ratio) / params.gamma;
        rep.prefactor_c2_literal =
            (4.0 * nu * kPi + params.s1 * rep.c2_mixed_literal) / params.gamma;
        rep.leading_value = rep.prefactor_c2_ratio;
    } else {
        const auto esc = renewal::escape_probability_d3(params);
        const double g0 =
            green::green_transient_occupation(params.d, std::span(origin.data(), params.d));
        const double ge1 =
            green::green_transient_occupation(params.d, std::span(e1.data(), params.d));
        const double we1 = 2.0 * params.d * ge1;
        const auto gq0 = green::green_generating(params.d, std::span(origin.data(), params.d),
                                                 renewal::make_clock(params).continuation);
        const auto gqe = green::green_generating(params.d, std::span(e1.data(), params.d),
                                                 renewal::make_clock(params).continuation);
        const double gg_ratio = gq0.value / (gq0.value - gqe.value);
        rep.green_occupation_origin = g0;
        rep.kd_occupation = ge1 * gg_ratio;
        rep.kd_discrete = we1 * gg_ratio;
        const double denom_rate = 2.0 * params.d * nu;
        const auto theorem_form = [&](double kd) {
            const double num = g0 + params.s1 / denom_rate;
            const double den = nu + params.gamma * (g0 + params.s1 * kd / denom_rate);
            return 1.0 - params.gamma * num / den;
        };
        rep.limit_theorem_occupation = theorem_form(rep.kd_occupation);
        rep.limit_theorem_discrete = theorem_form(rep.kd_discrete);
        rep.renewal_green = esc.renewal_green;
        rep.limit_proof_form =
            1.0 - params.gamma * esc.renewal_green / (1.0 + params.gamma * esc.renewal_green);
        rep.leading_value = rep.limit_proof_form;
    }
    if (t && params.d <= 2) rep.value_at_t = evaluate_at(params.d, rep.leading_value, *t);
    return rep;
}

AsymptoticReport baseline_asymptotic(const ModelParams& params, DormancyModel model,
                                     std::optional<double> t) {
    params.validate();
    if (!(params.gamma > 0.0))
        throw std::invalid_argument("baseline_asymptotic: requires gamma > 0");
    if (model == DormancyModel::none) return none_baseline(params, t);
    if (model != DormancyModel::stochastic)
        throw std::invalid_argument("baseline_asymptotic: model must be none or stochastic");

    AsymptoticReport rep;
    rep.d = params.d;
    rep.model = DormancyModel::stochastic;
    const double nu = params.rho + params.kappa;
    const double s0 = params.s0, s1 = params.s1;
    if (params.d == 1) {
        rep.leading_value =
            2.0 * std::sqrt((s0 + s1) * (s0 * nu + s1 * params.rho)) / (s0 * params.gamma);
    } else if (params.d == 2) {
        rep.leading_value = 4.0 * kPi * (s1 / s0 * params.rho + nu) / params.gamma;
    } else {
        const double g0 =
            green::green_transient_occupation(params.d, std::span(origin.data(), params.d));
        rep.green_occupation_origin = g0;
        const double active = s0 / (s0 + s1);
        rep.leading_value =
            1.0 - params.gamma * g0 / (active * (params.rho + active * params.kappa) +
                                       params.gamma * g0);
    }
    if (t && params.d <= 2) rep.value_at_t = evaluate_at(params.d, rep.leading_value, *t);
    return rep;
}

CrossoverReport crossover(const ModelParams& params) {
    params.validate();
    CrossoverReport rep;
    rep.degenerate_s1_zero = params.s1 == 0.0;

    rep.d1_s0 = params.s0;
    rep.d1_threshold = 2.0 * std::pow(params.rho, 1.5) * std::sqrt(params.kappa + params.rho);
    rep.d1_responsive_wins = !rep.degenerate_s1_zero && rep.d1_s0 > rep.d1_threshold;

    rep.d2_rhs = 4.0 * kPi * params.rho / params.s0;
    if (params.s1 > 0.0) {
        ModelParams p2 = params;
        p2.d = 2;
        const renewal::GeometricClock clock = renewal::make_clock(p2);
        const auto g0 = green::green_generating(2, std::span(origin.data(), 2), clock.continuation);
        const auto ge = green::green_generating(2, std::span(e1.data(), 2), clock.continuation);
        const auto gres1 = green::green_resolvent(2, std::span(origin.data(), 2), 1.0);
        rep.d2_c2_ratio = kPi * g0.value / (g0.value - ge.value);
        rep.d2_c2_literal = kPi * g0.value / (gres1.value + ge.value);
        rep.d2_wins_ratio = rep.d2_c2_ratio > rep.d2_rhs;
        rep.d2_wins_literal = rep.d2_c2_literal > rep.d2_rhs;
    }

    rep.d3 = std::max(params.d, 3);
    ModelParams p3 = params;
    p3.d = rep.d3;
    const double g0 = green::green_transient_occupation(rep.d3, std::span(origin.data(), rep.d3));
    rep.d3_lhs = params.kappa + params.rho;
    if (params.s1 > 0.0) {
        const auto ge1 = green::green_transient_occupation(rep.d3, std::span(e1.data(), rep.d3));
        const auto gq0 = green::green_generating(rep.d3, std::span(origin.data(), rep.d3),
                                                 renewal::make_clock(p3).continuation);
        const auto gqe = green::green_generating(rep.d3, std::span(e1.data(), rep.d3),
                                                 renewal::make_clock(p3).continuation);
        const double gg_ratio = gq0.value / (gq0.value - gqe.value);
        const double kd_occ = ge1 * gg_ratio;
        const double kd_disc = 2.0 * rep.d3 * ge1 * gg_ratio;
        rep.d3_rhs_occupation = params.gamma * g0 * (kd_occ - 1.0);
        rep.d3_rhs_discrete = params.gamma * g0 * (kd_disc - 1.0);
        rep.d3_increasing_occupation = rep.d3_lhs < rep.d3_rhs_occupation;
        rep.d3_increasing_discrete = rep.d3_lhs < rep.d3_rhs_discrete;
        rep.large_s1_limit_occupation = 1.0 - 1.0 / kd_occ;
        rep.large_s1_limit_discrete = 1.0 - 1.0 / kd_disc;
    }
    return rep;
}

std::string to_json(const AsymptoticReport& r) {
    nlohmann::json j;
    j["d"] = r.d;
    j["model"] = r.model == DormancyModel::responsive
                     ? "responsive"
                     : (r.model == DormancyModel::none ? "none" : "stochastic");
    j["leading_value"] = r.leading_value;
    if (r.value_at_t) j["value_at_t"] = *r.value_at_t;
    if (r.d == 1 && r.model == DormancyModel::responsive) {
        j["d1_constant_bare"] = r.d1_constant_bare;
        j["d1_constant_rho_weighted"] = r.d1_constant_rho_weighted;
        j["prefactor_bare"] = r.prefactor_bare;
        j["prefactor_rho_weighted"] = r.prefactor_rho_weighted;
    }
    if (r.d == 2 && r.model == DormancyModel::responsive) {
        j["c2_generating_ratio"] = r.c2_generating_ratio;
        j["c2_mixed_literal"] = r.c2_mixed_literal;
        j["prefactor_c2_ratio"] = r.prefactor_c2_ratio;
        j["prefactor_c2_literal"] = r.prefactor_c2_literal;
    }
    if (r.d >= 3) {
        j["green_occupation_origin"] = r.green_occupation_origin;
        if (r.model == DormancyModel::responsive) {
            j["kd_occupation"] = r.kd_occupation;
            j["kd_discrete"] = r.kd_discrete;
            j["limit_theorem_occupation"] = r.limit_theorem_occupation;
            j["limit_theorem_discrete"] = r.limit_theorem_discrete;
            j["limit_proof_form"] = r.limit_proof_form;
            j["renewal_green"] = r.renewal_green;
        }
    }
    return j.dump(2);
}

std::string to_json(const CrossoverReport& r) {
    nlohmann::json j;
    j["degenerate_s1_zero"] = r.degenerate_s1_zero;
    j["d1"] = {{"s0", r.d1_s0},
               {"threshold", r.d1_threshold},
               {"responsive_wins_large_s1", r.d1_responsive_wins}};
    j["d2"] = {{"rhs_4pi_rho_over_s0", r.d2_rhs},
               {"c2_generating_ratio", r.d2_c2_ratio},
               {"c2_mixed_literal", r.d2_c2_literal},
               {"wins_ratio_reading", r.d2_wins_ratio},
               {"wins_literal_reading", r.d2_wins_literal}};
    j["d3"] = {{"d", r.d3},
               {"lhs_kappa_plus_rho", r.d3_lhs},
               {"rhs_occupation", r.d3_rhs_occupation},
               {"rhs_discrete", r.d3_rhs_discrete},
               {"increasing_occupation", r.d3_increasing_occupation},
               {"increasing_discrete", r.d3_increasing_discrete},
               {"large_s1_limit_occupation", r.large_s1_limit_occupation},
               {"large_s1_limit_discrete", r.large_s1_limit_discrete}};
    return j.dump(2);
}

}  // namespace dormantwalk::asympt
