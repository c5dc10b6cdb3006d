// Command-line front end: wires the model, solver, kernel and asymptotics
// modules into reproducible experiments with CSV/JSON outputs.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical non-convergence,
// 3 acceptance failure.

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dormantwalk/acceptance.hpp"
#include "dormantwalk/asymptotics.hpp"
#include "dormantwalk/exact.hpp"
#include "dormantwalk/green.hpp"
#include "dormantwalk/model.hpp"
#include "dormantwalk/records.hpp"
#include "dormantwalk/renewal.hpp"

namespace {

using dormantwalk::ModelParams;
using dormantwalk::NonConvergenceError;
namespace records = dormantwalk::records;

struct CliOptions {
    records::ExperimentConfig config;
    std::string config_file;
    std::string t_grid;
    std::vector<int> x;
    std::string convention = "resolvent";
    double gap_tolerance = 0.0;
};

std::string iso_timestamp() {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void attach_common(CLI::App* cmd, CliOptions& opt) {
    auto& c = opt.config;
    cmd->add_option("--config", opt.config_file, "JSON config file; flags override its values");
    cmd->add_option("--d", c.params.d, "lattice dimension (1..5)");
    cmd->add_option("--kappa", c.params.kappa, "active per-neighbour jump rate");
    cmd->add_option("--rho", c.params.rho, "trap per-neighbour jump rate");
    cmd->add_option("--gamma", c.params.gamma, "killing rate at coincidence");
    cmd->add_option("--s0", c.params.s0, "wake-up rate");
    cmd->add_option("--s1", c.params.s1, "dormancy rate");
    cmd->add_option("--t", c.times, "evaluation times (repeatable)");
    cmd->add_option("--t-grid", opt.t_grid, "comma-separated evaluation times");
    cmd->add_option("--paths", c.paths, "Monte Carlo path count");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--radius", c.radius, "truncation radius (0 = per-dimension default)");
    cmd->add_option("--lambda", c.lambdas, "transform parameters (repeatable)");
    cmd->add_option("--estimator", c.estimator, "exposure | hardkill | both");
    cmd->add_option("--out", c.out, "output file (default stdout)");
    cmd->add_option("--format", c.format, "csv | json");
}

// Values from an explicit config file, overridden by any flag given on the
// command line.
void merge_config_file(const CLI::App* cmd, CliOptions& opt) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw std::invalid_argument("cannot open config file: " + opt.config_file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    records::ExperimentConfig file_cfg = records::ExperimentConfig::from_json_text(buffer.str());
    auto keep = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    records::ExperimentConfig merged = file_cfg;
    const records::ExperimentConfig& cli = opt.config;
    if (keep("--d")) merged.params.d = cli.params.d;
    if (keep("--kappa")) merged.params.kappa = cli.params.kappa;
    if (keep("--rho")) merged.params.rho = cli.params.rho;
    if (keep("--gamma")) merged.params.gamma = cli.params.gamma;
    if (keep("--s0")) merged.params.s0 = cli.params.s0;
    if (keep("--s1")) merged.params.s1 = cli.params.s1;
    if (keep("--t")) merged.times = cli.times;
    if (keep("--paths")) merged.paths = cli.paths;
    if (keep("--seed")) merged.seed = cli.seed;
    if (keep("--radius")) merged.radius = cli.radius;
    if (keep("--lambda")) merged.lambdas = cli.lambdas;
    if (keep("--estimator")) merged.estimator = cli.estimator;
    if (keep("--out")) merged.out = cli.out;
    if (keep("--format")) merged.format = cli.format;
    opt.config = merged;
}

void finalize_times(CliOptions& opt) {
    if (!opt.t_grid.empty()) {
        opt.config.times.clear();
        std::istringstream is(opt.t_grid);
        std::string tok;
        while (std::getline(is, tok, ',')) opt.config.times.push_back(std::stod(tok));
    }
    std::sort(opt.config.times.begin(), opt.config.times.end());
}

void emit(const records::ResultRecord& rec) {
    const std::string text =
        rec.config.format == "json" ? rec.to_json_text() : rec.to_csv();
    if (rec.config.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(rec.config.out);
        if (!out) throw std::invalid_argument("cannot write output file: " + rec.config.out);
        out << text;
    }
}

records::ResultRecord make_record(const CliOptions& opt, const char* experiment) {
    records::ResultRecord rec;
    rec.experiment = experiment;
    rec.config = opt.config;
    rec.config.experiment = experiment;
    rec.config_hash = rec.config.hash();
    rec.timestamp = iso_timestamp();
    return rec;
}

int radius_of(const CliOptions& opt) {
    return opt.config.radius > 0 ? opt.config.radius : records::default_radius(opt.config.params);
}

void run_simulate(CliOptions& opt) {
    finalize_times(opt);
    if (opt.config.times.empty()) opt.config.times = {10.0, 20.0, 50.0};
    const ModelParams& p = opt.config.params;
    p.validate();
    records::ResultRecord rec = make_record(opt, "simulate");
    const bool exposure = opt.config.estimator != "hardkill";
    const bool hardkill = opt.config.estimator == "hardkill" || opt.config.estimator == "both";
    rec.columns = {"t"};
    if (exposure) {
        rec.columns.push_back("survival_exposure");
        rec.columns.push_back("stderr_exposure");
    }
    if (hardkill) {
        rec.columns.push_back("survival_hardkill");
        rec.columns.push_back("stderr_hardkill");
    }
    std::vector<dormantwalk::SurvivalEstimate> soft;
    if (exposure)
        soft = estimate_survival_exposure(p, opt.config.times, opt.config.paths, opt.config.seed);
    for (std::size_t i = 0; i < opt.config.times.size(); ++i) {
        std::vector<double> row{opt.config.times[i]};
        if (exposure) {
            row.push_back(soft[i].mean);
            row.push_back(soft[i].std_error);
        }
        if (hardkill) {
            const auto hard = estimate_survival_hardkill(p, opt.config.times[i], opt.config.paths,
                                                         opt.config.seed + 1);
            row.push_back(hard.mean);
            row.push_back(hard.std_error);
        }
        rec.rows.push_back(std::move(row));
    }
    emit(rec);
}

void run_exact(CliOptions& opt) {
    finalize_times(opt);
    if (opt.config.times.empty()) opt.config.times = {10.0, 20.0, 50.0};
    opt.config.params.validate();
    records::ResultRecord rec = make_record(opt, "exact");
    const auto curve = dormantwalk::exact::survival(opt.config.params, radius_of(opt),
                                                    opt.config.times, opt.gap_tolerance);
    rec.columns = {"t", "lower", "upper", "gap"};
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        rec.rows.push_back({curve.times[i], curve.lower[i], curve.upper[i],
                            curve.upper[i] - curve.lower[i]});
    rec.scalars.emplace_back("max_gap", curve.max_gap());
    emit(rec);
}

void run_green(CliOptions& opt) {
    opt.config.params.validate();
    if (opt.config.lambdas.empty()) opt.config.lambdas = {1.0};
    while (opt.x.size() < static_cast<std::size_t>(opt.config.params.d)) opt.x.push_back(0);
    records::ResultRecord rec = make_record(opt, "green");
    namespace green = dormantwalk::green;
    std::vector<green::GreenValue> values;
    for (double lambda : opt.config.lambdas) {
        if (opt.convention == "resolvent" || opt.convention == "both")
            values.push_back(green::green_resolvent(
                opt.config.params.d, std::span(opt.x.data(), opt.config.params.d), lambda));
        if (opt.convention == "generating" || opt.convention == "both")
            values.push_back(green::green_generating(
                opt.config.params.d, std::span(opt.x.data(), opt.config.params.d), lambda));
    }
    rec.columns = {"dim", "convention", "parameter", "value", "est_error"};
    for (const auto& v : values)
        rec.rows.push_back({static_cast<double>(v.dim),
                            v.convention == green::Convention::resolvent ? 0.0 : 1.0, v.parameter,
                            v.value, v.est_error});
    if (opt.config.format == "csv" && opt.config.out.empty()) {
        // The tabulation schema carries x as a column; use it directly.
        std::cout << "# schema_version = 1\n# experiment = green\n# config = "
                  << rec.config.to_json_text() << "\n# config_hash = " << rec.config_hash
                  << "\n# seed = " << rec.config.seed << "\n"
                  << green::tabulate_csv(values);
        return;
    }
    emit(rec);
}

void run_renewal(CliOptions& opt) {
    opt.config.params.validate();
    const ModelParams& p = opt.config.params;
    records::ResultRecord rec = make_record(opt, "renewal");
    namespace renewal = dormantwalk::renewal;
    const auto clock = renewal::make_clock(p);
    rec.scalars.emplace_back("clock_continuation", clock.continuation);
    if (p.s1 > 0.0)
        rec.scalars.emplace_back("clock_escape_probability",
                                 renewal::clock_escape_probability(p));
    if (p.d >= 3) {
        const auto esc = renewal::escape_probability_d3(p);
        rec.scalars.emplace_back("escape_probability", esc.value);
        rec.scalars.emplace_back("renewal_green", esc.renewal_green);
        rec.scalars.emplace_back("escape_literal_occupation", esc.literal_occupation);
        rec.scalars.emplace_back("escape_literal_discrete", esc.literal_discrete);
        rec.scalars.emplace_back("gtilde_occupation", esc.gtilde_occupation);
        rec.scalars.emplace_back("gtilde_discrete", esc.gtilde_discrete);
        if (!esc.literal_occupation_valid || !esc.literal_discrete_valid)
            std::cerr << "note: a literal normalization reading left [0,1]; "
                         "see escape_literal_* scalars\n";
    } else {
        if (opt.config.lambdas.empty()) opt.config.lambdas = {1e-4, 1e-5};
        rec.columns = {"lambda", "z1_laplace_expansion", "leading_constant", "within_validity"};
        for (double lambda : opt.config.lambdas) {
            const auto ex = renewal::z1_laplace_expansion(p, lambda);
            if (!ex.within_validity)
                std::cerr << "warning: lambda=" << lambda
                          << " outside the documented validity range (<=1e-2)\n";
            rec.rows.push_back(
                {lambda, ex.value, ex.leading_constant, ex.within_validity ? 1.0 : 0.0});
        }
    }
    emit(rec);
}

void run_asympt(CliOptions& opt) {
    finalize_times(opt);
    opt.config.params.validate();
    const ModelParams& p = opt.config.params;
    namespace asympt = dormantwalk::asympt;
    const std::optional<double> t =
        opt.config.times.empty() ? std::nullopt
                                 : std::optional<double>(opt.config.times.back());
    const auto responsive = asympt::responsive_asymptotic(p, t);
    const auto none = asympt::baseline_asymptotic(p, asympt::DormancyModel::none, t);
    const auto stochastic = asympt::baseline_asymptotic(p, asympt::DormancyModel::stochastic, t);
    const auto cross = asympt::crossover(p);

    if (opt.config.format == "json") {
        nlohmann::json j;
        j["config"] = nlohmann::json::parse(opt.config.to_json_text());
        j["config_hash"] = opt.config.hash();
        j["responsive"] = nlohmann::json::parse(asympt::to_json(responsive));
        j["none"] = nlohmann::json::parse(asympt::to_json(none));
        j["stochastic"] = nlohmann::json::parse(asympt::to_json(stochastic));
        j["crossover"] = nlohmann::json::parse(asympt::to_json(cross));
        const std::string text = j.dump(2) + "\n";
        if (opt.config.out.empty())
            std::cout << text;
        else
            std::ofstream(opt.config.out) << text;
        return;
    }
    records::ResultRecord rec = make_record(opt, "asympt");
    rec.columns = {"quantity", "responsive", "none", "stochastic"};
    rec.rows.push_back({0.0, responsive.leading_value, none.leading_value,
                        stochastic.leading_value});
    if (t)
        rec.rows.push_back({1.0, responsive.value_at_t.value_or(responsive.leading_value),
                            none.value_at_t.value_or(none.leading_value),
                            stochastic.value_at_t.value_or(stochastic.leading_value)});
    rec.scalars.emplace_back("crossover_d1_threshold", cross.d1_threshold);
    rec.scalars.emplace_back("crossover_d2_c2_ratio", cross.d2_c2_ratio);
    rec.scalars.emplace_back("crossover_d2_rhs", cross.d2_rhs);
    emit(rec);
}

void run_compare(CliOptions& opt) {
    finalize_times(opt);
    if (opt.config.times.empty()) opt.config.times = {10.0, 50.0, 100.0};
    opt.config.params.validate();
    const ModelParams& p = opt.config.params;
    namespace asympt = dormantwalk::asympt;
    records::ResultRecord rec = make_record(opt, "compare");
    const auto values = dormantwalk::exact::survival_one_boundary(
        p, radius_of(opt), opt.config.times, dormantwalk::exact::Boundary::reflecting);
    const auto rep = asympt::responsive_asymptotic(p);
    if (p.d <= 2) {
        const double pre_default = rep.leading_value;
        const double pre_alt =
            p.d == 1 ? rep.prefactor_bare : rep.prefactor_c2_literal;
        rec.columns = {"t", "value", "prediction", "prediction_alt", "ratio", "ratio_alt"};
        for (std::size_t i = 0; i < opt.config.times.size(); ++i) {
            const double t = opt.config.times[i];
            const double scale =
                p.d == 1 ? std::sqrt(std::numbers::pi * t) : std::log(t);
            const double pred = pre_default / scale;
            const double pred_alt = pre_alt > 0.0 ? pre_alt / scale : 0.0;
            rec.rows.push_back({t, values[i], pred, pred_alt,
                                pre_default > 0 ? values[i] * scale / pre_default : 0.0,
                                pre_alt > 0 ? values[i] * scale / pre_alt : 0.0});
        }
    } else {
        rec.columns = {"t", "value", "limit_proof_form", "limit_theorem_occupation",
                       "limit_theorem_discrete"};
        for (std::size_t i = 0; i < opt.config.times.size(); ++i)
            rec.rows.push_back({opt.config.times[i], values[i], rep.limit_proof_form,
                                rep.limit_theorem_occupation, rep.limit_theorem_discrete});
    }
    emit(rec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and numerical verification of a trapped random walk "
                 "with responsive dormancy"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo survival estimates");
    CLI::App* exact = app.add_subcommand("exact", "truncated-generator survival curves");
    CLI::App* green = app.add_subcommand("green", "lattice kernel tabulation");
    CLI::App* renewal = app.add_subcommand("renewal", "regeneration-time quantities");
    CLI::App* asympt = app.add_subcommand("asympt", "closed-form asymptotics");
    CLI::App* compare = app.add_subcommand("compare", "overlay solver values and predictions");
    CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
    for (CLI::App* cmd : {simulate, exact, green, renewal, asympt, compare})
        attach_common(cmd, opt);
    green->add_option("--x", opt.x, "lattice argument (repeatable, defaults to the origin)");
    green->add_option("--convention", opt.convention, "resolvent | generating | both");
    exact->add_option("--gap-tol", opt.gap_tolerance,
                      "fail (exit 2) if the bracketing gap exceeds this");
    std::uint64_t accept_seed = 0x5eedu;
    accept->add_option("--seed", accept_seed, "master seed for the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        merge_config_file(cmd, opt);
        if (cmd == simulate) run_simulate(opt);
        else if (cmd == exact) run_exact(opt);
        else if (cmd == green) run_green(opt);
        else if (cmd == renewal) run_renewal(opt);
        else if (cmd == asympt) run_asympt(opt);
        else if (cmd == compare) run_compare(opt);
        else if (cmd == accept) {
            const int failures = dormantwalk::acceptance::run_and_report(accept_seed);
            return failures == 0 ? 0 : 3;
        }
    } catch (const NonConvergenceError& e) {
        std::cerr << "numerical non-convergence: " << e.what()
                  << " (previous=" << e.previous_value << ", last=" << e.last_value << ")\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
