#pragma once

/// @file engine.hpp
/// @brief Run orchestration: time loop, verdicts, outputs, sweeps and the
/// built-in verification battery.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chemo/config.hpp"
#include "chemo/diagnostics.hpp"
#include "chemo/regimes.hpp"

namespace chemo {

enum class Verdict { CompletedBounded, CompletedGrowing, NumericalBlowUpSuspected, SolverFailure };

/// Which numerical failure stopped a run. u_ceiling and v_floor mirror the two
/// ways a classical solution can cease to exist; dt_collapse is a step-size failure.
enum class Trigger { UCeiling, VFloor, DtCollapse };

std::string to_string(Verdict v);
std::string to_string(Trigger t);

/// Process exit code for a verdict: 0 completed, 3 numerical trigger, 4 solver failure.
int exit_code(Verdict v);

struct RunChecks {
    double m_star = 0.0;
    BoundVerdict mass_bound;
    BoundVerdict rayleigh;
    PersistenceVerdict persistence;
    /// Observed C in d/dt integral ln u >= -C.
    double log_mass_decay_rate = 0.0;

    ThresholdVerdict regime;
    std::optional<BetaWindow> beta;
    /// When beta exists: neg_power(u, p_hat) after t = 1 stays below twice its t = 1 value.
    std::optional<bool> neg_power_bounded;
    double neg_power_at_t1 = 0.0;
    double neg_power_max_after_t1 = 0.0;

    std::optional<LpPlan> lp_plan;
    std::string lp_plan_error;
    double lp_plan_p_lower = 0.0;
    double lp_plan_p_upper = 0.0;
};

struct RunOutcome {
    Verdict verdict = Verdict::CompletedBounded;
    std::optional<Trigger> trigger;
    std::string message;
    double t_reached = 0.0;
    long steps = 0;
    double peak_max_u = 0.0;
    double min_min_v = 0.0;
    std::vector<DiagnosticsRecord> series;
    /// Monitor spec actually used (configured exponents plus automatic ones).
    MonitorSpec monitor;
    RunChecks checks;
    std::string diagnostics_path;
    std::string summary_path;
};

/// Runs to t_end or the first failure. Solver errors end up in the verdict;
/// only I/O problems throw. Files are written when output_dir is set.
RunOutcome run(const RunConfig& config);

/// Tail-trend classification: bounded iff the max of max_u over the final third
/// of [0, t_end] is at most `factor` times the max over the middle third.
Verdict classify_tail(const std::vector<DiagnosticsRecord>& series, double t_end, double factor);

std::string summary_json(const RunConfig& config, const RunOutcome& outcome);

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;

    /// Parses `key=v1,v2,...`.
    static SweepAxis parse(const std::string& spec);
};

struct SweepOptions {
    int jobs = 1;
    /// Write per-cell outputs under <outdir>/cell_<index>; empty disables files.
    std::string outdir;
    /// Optional permutation of cell indices giving the execution order.
    std::vector<std::size_t> order;
};

struct SweepRow {
    std::size_t cell = 0;
    std::vector<std::string> axis_values;
    double a_inf = 0.0;
    double threshold = 0.0;
    /// above | below | boundary (a_inf equal to the threshold is left unclassified).
    std::string regime;
    std::string verdict;
    std::string trigger;
    double t_reached = 0.0;
    double peak_max_u = 0.0;
    double min_min_v = 0.0;
};

struct SweepTable {
    std::vector<std::string> axis_keys;
    std::vector<SweepRow> rows;

    std::string csv() const;
};

/// Runs the Cartesian product of the axes over the template. Cell k uses seed
/// derive_seed(run.seed, k). Per-cell failures are recorded, never thrown.
SweepTable sweep(const KeyValues& base, const std::vector<SweepAxis>& axes,
                 const SweepOptions& options = {});

struct CheckItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Elliptic convergence, mean identity, discrete mass identity, logistic
/// oracle, reverse Hoelder trials and the regime property trials.
std::vector<CheckItem> self_check();

}  // namespace chemo
