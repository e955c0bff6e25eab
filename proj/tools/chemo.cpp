// Command-line front end: run, sweep, regimes, check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemo/engine.hpp"
#include "chemo/errors.hpp"
#include "chemo/regimes.hpp"

namespace {

constexpr int kConfigErrorExit = 2;

/// Applies trailing `--section.key=value` (or `section.key=value`) overrides.
void apply_overrides(chemo::KeyValues& kv, const std::vector<std::string>& extras) {
    for (std::string arg : extras) {
        if (arg.rfind("--", 0) == 0) arg.erase(0, 2);
        kv.set_assignment(arg);
    }
}

nlohmann::json plan_json(const chemo::LpPlan& plan) {
    nlohmann::json flags;
    for (const auto& [name, ok] : plan.flags) flags[name] = ok;
    return {{"c", plan.c},         {"alpha", plan.alpha},     {"alpha_gap", plan.alpha_gap},
            {"lambda", plan.lambda}, {"h", plan.h},             {"d", plan.d},
            {"p_lower", plan.p_lower}, {"p_upper", plan.p_upper}, {"p", plan.p},
            {"l", plan.l},         {"r", plan.r},             {"m", plan.m},
            {"epsilon", plan.epsilon}, {"epsilon_max", plan.epsilon_max},
            {"shrinks", plan.shrinks}, {"flags", flags},       {"all_flags", plan.all_flags()}};
}

int cmd_run(const std::string& path, const std::vector<std::string>& extras) {
    chemo::KeyValues kv = chemo::KeyValues::parse_file(path);
    apply_overrides(kv, extras);
    const chemo::RunConfig cfg = chemo::RunConfig::from_key_values(kv);
    const chemo::RunOutcome out = chemo::run(cfg);
    std::cout << chemo::summary_json(cfg, out) << '\n';
    return chemo::exit_code(out.verdict);
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& axis_specs, int jobs,
              const std::string& outdir, const std::string& csv_path,
              const std::vector<std::string>& extras) {
    chemo::KeyValues kv = chemo::KeyValues::parse_file(path);
    apply_overrides(kv, extras);
    std::vector<chemo::SweepAxis> axes;
    for (const auto& spec : axis_specs) axes.push_back(chemo::SweepAxis::parse(spec));
    chemo::SweepOptions options;
    options.jobs = jobs;
    options.outdir = outdir;
    const chemo::SweepTable table = chemo::sweep(kv, axes, options);
    if (csv_path.empty()) {
        std::cout << table.csv();
    } else {
        std::ofstream os(csv_path);
        if (!os) throw chemo::Error("cannot write '" + csv_path + "'");
        os << table.csv();
    }
    for (const auto& row : table.rows) {
        if (row.verdict == "ConfigError") return kConfigErrorExit;
    }
    return 0;
}

int cmd_regimes(double chi, double mu, double a_inf, int dim, std::optional<double> c,
                std::optional<double> h_frac, std::optional<double> alpha_gap) {
    nlohmann::json j;
    const chemo::ThresholdVerdict tv = chemo::boundedness_threshold(chi, mu, a_inf);
    j["threshold"] = tv.threshold;
    j["satisfied"] = tv.satisfied;
    j["on_boundary"] = tv.on_boundary;
    if (tv.satisfied) {
        try {
            const chemo::BetaWindow w = chemo::beta_window(chi, mu, a_inf);
            j["beta_window"] = {{"beta_minus", w.beta_minus}, {"beta_plus", w.beta_plus},
                                {"chosen_beta", w.chosen_beta}, {"p_hat", w.p_hat},
                                {"f_chosen", w.f_chosen}};
        } catch (const chemo::ThresholdNotMet& e) {
            j["beta_window"] = {{"error", e.what()}};
        }
    }
    bool all_flags = false;
    try {
        const chemo::LpPlan plan = c ? chemo::lp_parameter_plan(*c, h_frac.value_or(0.5),
                                                                alpha_gap.value_or(0.5 * (1.0 / *c - 0.5)))
                                     : chemo::select_lp_exponent(dim);
        j["lp_plan"] = plan_json(plan);
        all_flags = plan.all_flags();
    } catch (const chemo::InfeasiblePlan& e) {
        j["lp_plan"] = {{"error", e.what()}, {"p_lower", e.p_lower()}, {"p_upper", e.p_upper()}};
    }
    std::cout << j.dump(2) << '\n';
    return all_flags ? 0 : 1;
}

int cmd_check() {
    bool all = true;
    for (const auto& item : chemo::self_check()) {
        std::printf("%-24s %s  %s\n", item.name.c_str(), item.pass ? "PASS" : "FAIL", item.detail.c_str());
        all = all && item.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume chemotaxis simulator with singular sensitivity and logistic source"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one configuration; extra --key=value pairs override it");
    run->add_option("config", config_path, "key=value config file")->required();
    run->allow_extras();

    std::vector<std::string> axes;
    int jobs = 1;
    std::string outdir, csv_path;
    auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of parameter axes");
    sweep->add_option("config", config_path, "key=value template config")->required();
    sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)")->required();
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", outdir, "per-cell output root (cell_<k>/)");
    sweep->add_option("--csv", csv_path, "write the phase table here instead of stdout");
    sweep->allow_extras();

    double chi = 0.0, mu = 0.0, a_inf = 0.0;
    int dim = 1;
    std::optional<double> c, h_frac, alpha_gap;
    auto* regimes = app.add_subcommand("regimes", "Threshold, beta window and L^p exponent plan");
    regimes->add_option("--chi", chi)->required();
    regimes->add_option("--mu", mu)->required();
    regimes->add_option("--a-inf", a_inf)->required();
    regimes->add_option("--dim", dim)->check(CLI::Range(1, 2));
    regimes->add_option("--c", c, "plan for this c instead of searching");
    regimes->add_option("--h-frac", h_frac);
    regimes->add_option("--alpha-gap", alpha_gap);

    auto* check = app.add_subcommand("check", "Built-in verification battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigErrorExit;
    }

    try {
        if (*run) return cmd_run(config_path, run->remaining());
        if (*sweep) return cmd_sweep(config_path, axes, jobs, outdir, csv_path, sweep->remaining());
        if (*regimes) return cmd_regimes(chi, mu, a_inf, dim, c, h_frac, alpha_gap);
        if (*check) return cmd_check();
    } catch (const chemo::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kConfigErrorExit;
    } catch (const chemo::ParameterError& e) {
        std::cerr << e.what() << '\n';
        return kConfigErrorExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
