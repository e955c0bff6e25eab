#pragma once

/// @file diagnostics.hpp
/// @brief Integral functionals of (u, v) and the runtime bound checks built on them.
///
/// Every integral uses the midpoint rule of mesh.hpp. Bound checks compare with
/// a relative tolerance that only absorbs discretization and roundoff; the
/// inequalities themselves carry no slack.

#include <map>
#include <string>
#include <vector>

#include "chemo/mesh.hpp"

namespace chemo {

/// Cells below this value count as zero for log_mass and neg_power.
inline constexpr double kDegenerateCell = 1e-300;

enum class Strictness { Lenient, Strict };

/// (integral f^p)^(1/p); p >= 1, f >= 0.
double lp_norm(const ScalarField& f, double p);

/// integral u^q / v^s.
double weighted_integral(const ScalarField& u, const ScalarField& v, double q, double s);

/// integral |grad v|^q / v^s with |grad v|^2 from cell_gradient_sq.
double grad_weighted_integral(const ScalarField& v, double q, double s);

/// integral ln u. Lenient mode returns -inf when a cell is below kDegenerateCell;
/// Strict mode throws DomainError instead.
double log_mass(const ScalarField& u, Strictness mode = Strictness::Lenient);

/// integral u^(-p); +inf (Lenient) or DomainError (Strict) on degenerate cells.
double neg_power(const ScalarField& u, double p, Strictness mode = Strictness::Lenient);

/// ||grad v||_{L^q} with q = n p / (n - p), divided by ||u||_{L^p}. Requires 1 < p < dim.
double gradient_ratio(const ScalarField& u, const ScalarField& v, double p);

/// Face-based form of integral |grad v|^2 / v^2: sum over interior faces of
/// (v_R - v_L)^2 / (h^2 v_L v_R) times the cell volume. For v solving the
/// discrete chemical equation this equals mu |Omega| - nu * integral(u / v) exactly.
double rayleigh_face(const ScalarField& v);

struct DiagnosticsRecord {
    double t = 0.0;
    long step = 0;
    double dt = 0.0;
    double mass = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double min_v = 0.0;
    double max_v = 0.0;
    double rayleigh = 0.0;
    double log_mass = 0.0;
    double v_ratio = 0.0;
    double elliptic_residual = 0.0;
    std::map<double, double> lp_norms;
    std::map<double, double> neg_power;
    std::map<double, double> grad_ratio;
};

struct MonitorSpec {
    std::vector<double> lp_exponents{2.0};
    std::vector<double> neg_power_exponents{1.0};
    /// Only exponents with 1 < p < dim are evaluated.
    std::vector<double> grad_ratio_exponents{1.5};
};

DiagnosticsRecord compute_record(double t, long step, double dt, const ScalarField& u,
                                 const ScalarField& v, double elliptic_residual,
                                 const MonitorSpec& spec);

/// Column names in output order. The first eight are fixed:
/// t,mass,min_u,max_u,min_v,max_v,rayleigh,log_mass.
std::vector<std::string> csv_header(const MonitorSpec& spec, int dim);
std::string csv_row(const DiagnosticsRecord& r, const MonitorSpec& spec, int dim);

/// max{ integral u0, a_sup / b_inf |Omega| }; +inf when b_inf == 0.
double mass_ceiling(double initial_mass, double a_sup, double b_inf, double measure);

struct BoundVerdict {
    bool pass = false;
    /// bound - value, relative to the bound (negative means violated).
    double margin = 0.0;
    double value = 0.0;
    double bound = 0.0;
};

/// mass <= m_star (1 + 1e-8).
BoundVerdict check_mass_bound(const DiagnosticsRecord& record, double m_star);

/// Worst sample of check_mass_bound over a series.
BoundVerdict check_mass_bound(const std::vector<DiagnosticsRecord>& series, double m_star);

/// rayleigh <= mu |Omega| (1 + tol) at every sample.
BoundVerdict check_rayleigh_bound(const std::vector<DiagnosticsRecord>& series, double mu,
                                  double measure, double tol);

struct PersistenceVerdict {
    bool pass = false;
    double min_mass = 0.0;
    double min_v = 0.0;
    double mass_floor = 0.0;
    double v_floor = 0.0;
};

/// min mass >= mass_floor > 0 and min of min_v >= v_floor > 0 over the series.
/// An empty series, or any degenerate sample, fails.
PersistenceVerdict check_persistence(const std::vector<DiagnosticsRecord>& series,
                                     double mass_floor, double v_floor);

/// Trend form: floors are half the minima over the first half of the series
/// (by sample count); passes iff the second half stays above them.
PersistenceVerdict check_persistence_trend(const std::vector<DiagnosticsRecord>& series);

/// -min over consecutive samples of d(log_mass)/dt; the observed constant C
/// in d/dt integral ln u >= -C. +inf when a sample is degenerate.
double log_mass_decay_rate(const std::vector<DiagnosticsRecord>& series);

struct HolderCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// integral fg >= (integral f^(1/p))^p (integral g^(-1/(p-1)))^(-(p-1)) for p > 1,
/// accepted with 1e-12 relative slack. Requires f >= 0 and g > 0.
HolderCheck reverse_holder_check(const ScalarField& f, const ScalarField& g, double p);

}  // namespace chemo
