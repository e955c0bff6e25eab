#include "chemo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "chemo/errors.hpp"
#include "chemo/stepper.hpp"

namespace chemo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_exponent(std::vector<double>& list, double p) {
    if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(p);
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    return os;
}

void write_diagnostics(const fs::path& path, const RunOutcome& out, int dim) {
    std::ofstream os = open_output(path);
    const auto header = csv_header(out.monitor, dim);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : out.series) os << csv_row(r, out.monitor, dim) << '\n';
}

void evaluate_checks(const RunConfig& cfg, RunOutcome& out, const Grid& g) {
    RunChecks& c = out.checks;
    c.mass_bound = check_mass_bound(out.series, c.m_star);
    c.rayleigh = check_rayleigh_bound(out.series, cfg.model.mu, g.measure(), cfg.rayleigh_tol);
    c.persistence = check_persistence_trend(out.series);
    // The degenerate state itself is never recorded, so the trend alone can miss it.
    if (out.trigger == Trigger::VFloor) c.persistence.pass = false;
    c.log_mass_decay_rate = log_mass_decay_rate(out.series);

    if (c.beta) {
        const double p = c.beta->p_hat;
        auto first = std::find_if(out.series.begin(), out.series.end(),
                                  [](const DiagnosticsRecord& r) { return r.t >= 1.0; });
        if (first != out.series.end() && first->neg_power.count(p)) {
            c.neg_power_at_t1 = first->neg_power.at(p);
            c.neg_power_max_after_t1 = 0.0;
            for (auto it = first; it != out.series.end(); ++it) {
                c.neg_power_max_after_t1 = std::max(c.neg_power_max_after_t1, it->neg_power.at(p));
            }
            c.neg_power_bounded = std::isfinite(c.neg_power_at_t1) &&
                                  c.neg_power_max_after_t1 <= 2.0 * c.neg_power_at_t1;
        }
    }
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CompletedBounded: return "CompletedBounded";
        case Verdict::CompletedGrowing: return "CompletedGrowing";
        case Verdict::NumericalBlowUpSuspected: return "NumericalBlowUpSuspected";
        case Verdict::SolverFailure: return "SolverFailure";
    }
    return "unknown";
}

std::string to_string(Trigger t) {
    switch (t) {
        case Trigger::UCeiling: return "u_ceiling";
        case Trigger::VFloor: return "v_floor";
        case Trigger::DtCollapse: return "dt_collapse";
    }
    return "unknown";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::CompletedBounded:
        case Verdict::CompletedGrowing: return 0;
        case Verdict::NumericalBlowUpSuspected: return 3;
        case Verdict::SolverFailure: return 4;
    }
    return 4;
}

Verdict classify_tail(const std::vector<DiagnosticsRecord>& series, double t_end, double factor) {
    double middle = -kInf, tail = -kInf;
    for (const auto& r : series) {
        if (r.t >= t_end / 3.0 && r.t < 2.0 * t_end / 3.0) middle = std::max(middle, r.max_u);
        if (r.t >= 2.0 * t_end / 3.0) tail = std::max(tail, r.max_u);
    }
    if (!std::isfinite(middle) || !std::isfinite(tail)) return Verdict::CompletedGrowing;
    return tail <= factor * middle ? Verdict::CompletedBounded : Verdict::CompletedGrowing;
}

RunOutcome run(const RunConfig& cfg) {
    cfg.validate();
    const Grid g = cfg.grid.build();
    const ScalarField u0 = cfg.ic.build(g, cfg.seed);

    RunOutcome out;
    out.monitor = cfg.monitor;
    RunChecks& checks = out.checks;
    checks.regime = boundedness_threshold(cfg.model.chi, cfg.model.mu, cfg.model.a.inf());
    if (checks.regime.satisfied) {
        try {
            checks.beta = beta_window(cfg.model.chi, cfg.model.mu, checks.regime.a_inf);
            if (cfg.auto_exponents) add_exponent(out.monitor.neg_power_exponents, checks.beta->p_hat);
        } catch (const ThresholdNotMet&) {
            // Window narrower than double precision resolves; nothing to monitor.
        }
    }
    try {
        checks.lp_plan = select_lp_exponent(g.dim());
        if (cfg.auto_exponents) add_exponent(out.monitor.lp_exponents, checks.lp_plan->p);
    } catch (const InfeasiblePlan& e) {
        checks.lp_plan_error = e.what();
        checks.lp_plan_p_lower = e.p_lower();
        checks.lp_plan_p_upper = e.p_upper();
    }
    checks.m_star = mass_ceiling(integrate(u0), cfg.model.a.sup(), cfg.model.b.inf(), g.measure());

    fs::path outdir;
    const bool files = !cfg.output_dir.empty();
    const bool snapshots = files && cfg.snapshot_every > 0.0;
    if (files) {
        outdir = cfg.output_dir;
        fs::create_directories(outdir);
        if (snapshots) fs::create_directories(outdir / "snapshots");
    }
    long snapshot_index = 0;
    auto snapshot = [&](const SimState& s) {
        std::ofstream os = open_output(outdir / "snapshots" / ("t" + std::to_string(snapshot_index++) + ".field"));
        write_snapshot(os, s.u, s.t);
    };
    auto record = [&](const SimState& s) {
        out.series.push_back(
            compute_record(s.t, s.step, s.dt_last, s.u, s.v, s.elliptic_residual, out.monitor));
    };

    std::optional<SimState> state;
    out.peak_max_u = u0.max();
    out.min_min_v = kInf;
    try {
        state = make_initial_state(u0, cfg.model, cfg.stepper, cfg.elliptic);
        out.min_min_v = state->v.min();
        record(*state);
        if (snapshots) snapshot(*state);

        long next_diag = 1;
        long next_snap = 1;
        auto diag_time = [&](long k) { return std::min(static_cast<double>(k) * cfg.diagnostics_every, cfg.t_end); };
        auto snap_time = [&](long k) { return static_cast<double>(k) * cfg.snapshot_every; };
        while (state->t < cfg.t_end) {
            double target = diag_time(next_diag);
            if (snapshots) target = std::min(target, snap_time(next_snap));
            const double cap = target - state->t;
            SimState next = advance(*state, cfg.model, cfg.stepper, cfg.elliptic, cap);
            if (next.dt_last >= cap) next.t = target;
            state = std::move(next);
            out.peak_max_u = std::max(out.peak_max_u, state->u.max());
            out.min_min_v = std::min(out.min_min_v, state->v.min());
            if (state->t >= diag_time(next_diag)) {
                record(*state);
                while (diag_time(next_diag) <= state->t && diag_time(next_diag) < cfg.t_end) ++next_diag;
            }
            if (snapshots && state->t >= snap_time(next_snap)) {
                snapshot(*state);
                while (snap_time(next_snap) <= state->t) ++next_snap;
            }
        }
        out.verdict = classify_tail(out.series, cfg.t_end, cfg.bounded_factor);
    } catch (const StepError& e) {
        out.verdict = Verdict::NumericalBlowUpSuspected;
        out.message = e.what();
        switch (e.kind()) {
            case StepFailure::Overflow: out.trigger = Trigger::UCeiling; break;
            case StepFailure::Degeneracy: out.trigger = Trigger::VFloor; break;
            case StepFailure::TimestepCollapse: out.trigger = Trigger::DtCollapse; break;
        }
    } catch (const SolverFailure& e) {
        out.verdict = Verdict::SolverFailure;
        out.message = e.what();
    }
    if (state) {
        out.t_reached = state->t;
        out.steps = state->step;
        if (out.series.empty() || out.series.back().t < state->t) record(*state);
    }

    evaluate_checks(cfg, out, g);

    if (files) {
        out.diagnostics_path = (outdir / "diagnostics.csv").string();
        out.summary_path = (outdir / "summary.json").string();
        write_diagnostics(out.diagnostics_path, out, g.dim());
        std::ofstream os = open_output(out.summary_path);
        os << summary_json(cfg, out) << '\n';
    }
    return out;
}

std::string summary_json(const RunConfig& cfg, const RunOutcome& out) {
    const RunChecks& c = out.checks;
    json j;
    j["verdict"] = to_string(out.verdict);
    j["trigger"] = out.trigger ? json(to_string(*out.trigger)) : json(nullptr);
    j["message"] = out.message;
    j["t_end"] = cfg.t_end;
    j["t_reached"] = out.t_reached;
    j["steps"] = out.steps;
    j["peak_max_u"] = out.peak_max_u;
    j["min_min_v"] = out.min_min_v;
    j["samples"] = out.series.size();

    json checks;
    checks["mass_bound"] = {{"pass", c.mass_bound.pass},
                            {"m_star", c.m_star},
                            {"max_mass", c.mass_bound.value},
                            {"relative_margin", c.mass_bound.margin}};
    checks["rayleigh"] = {{"pass", c.rayleigh.pass},
                          {"bound", c.rayleigh.bound},
                          {"max_value", c.rayleigh.value},
                          {"relative_margin", c.rayleigh.margin},
                          {"tolerance", cfg.rayleigh_tol}};
    checks["persistence_trend"] = {{"pass", c.persistence.pass},
                                   {"min_mass", c.persistence.min_mass},
                                   {"mass_floor", c.persistence.mass_floor},
                                   {"min_v", c.persistence.min_v},
                                   {"v_floor", c.persistence.v_floor}};
    checks["log_mass_decay_rate"] = c.log_mass_decay_rate;
    if (c.neg_power_bounded) {
        checks["neg_power_trend"] = {{"pass", *c.neg_power_bounded},
                                     {"p_hat", c.beta->p_hat},
                                     {"value_at_t1", c.neg_power_at_t1},
                                     {"max_after_t1", c.neg_power_max_after_t1}};
    } else {
        checks["neg_power_trend"] = nullptr;
    }
    j["checks"] = checks;

    json regime = {{"chi", c.regime.chi},
                   {"mu", c.regime.mu},
                   {"a_inf", c.regime.a_inf},
                   {"threshold", c.regime.threshold},
                   {"satisfied", c.regime.satisfied},
                   {"on_boundary", c.regime.on_boundary}};
    if (c.beta) {
        regime["beta_window"] = {{"beta_minus", c.beta->beta_minus},
                                 {"beta_plus", c.beta->beta_plus},
                                 {"chosen_beta", c.beta->chosen_beta},
                                 {"p_hat", c.beta->p_hat}};
    }
    j["regime"] = regime;
    if (c.lp_plan) {
        j["lp_plan"] = {{"status", "feasible"}, {"p", c.lp_plan->p}};
    } else {
        j["lp_plan"] = {{"status", "infeasible"},
                        {"p_lower", c.lp_plan_p_lower},
                        {"p_upper", c.lp_plan_p_upper},
                        {"message", c.lp_plan_error}};
    }
    j["files"] = {{"diagnostics", out.diagnostics_path}};
    return j.dump(2);
}

}  // namespace chemo
