#pragma once

/// @file stepper.hpp
/// @brief Explicit conservative update of the cell density
///
///   u_t = Delta u - div( u * chi * grad v / v ) + u (a(x,t) - b(x,t) u)
///
/// Diffusion uses central face gradients, the chemotactic drift is donor-cell
/// upwinded on the face velocity w = chi * grad v / v_face, and the logistic
/// term is applied explicitly with coefficients frozen at the step's start time.
/// All face fluxes vanish on the boundary, so sum(u) changes only through the
/// reaction term.

#include <limits>

#include "chemo/elliptic.hpp"
#include "chemo/mesh.hpp"

namespace chemo {

/// A positive coefficient c * (1 + eps_x cos(k pi x / Lx)) * (1 + eps_t sin(omega t)).
/// The constant family is eps_x = eps_t = 0.
struct CoefficientSpec {
    enum class Family { Constant, Separable };

    Family family = Family::Constant;
    double scale = 1.0;
    double eps_x = 0.0;
    double wave_number = 0.0;
    double eps_t = 0.0;
    double omega = 0.0;

    static CoefficientSpec constant(double c);
    static CoefficientSpec separable(double c, double eps_x, double wave_number, double eps_t,
                                     double omega);

    /// Value at position x along axis 0 of a domain of length `lx`, time t.
    double value(double x, double t, double lx) const;
    /// Cell-center samples at time t.
    ScalarField sample(const Grid& g, double t) const;

    /// Exact infimum / supremum over the closed domain and all t.
    double inf() const;
    double sup() const;

    /// Constant coefficients may be zero; separable ones need scale > 0 and
    /// |eps_x| + |eps_t| < 1.
    void validate() const;
};

struct ModelParams {
    double chi = 1.0;
    double mu = 1.0;
    double nu = 1.0;
    CoefficientSpec a = CoefficientSpec::constant(1.0);
    CoefficientSpec b = CoefficientSpec::constant(1.0);

    void validate() const;
};

struct StepperConfig {
    double cfl_safety = 0.4;
    double dt_min = 1e-12;
    double u_ceiling = 1e8;
    double v_floor = 1e-12;

    void validate() const;
};

struct SimState {
    double t = 0.0;
    long step = 0;
    ScalarField u;
    ScalarField v;
    double dt_last = 0.0;
    /// Relative residual of the elliptic solve that produced v.
    double elliptic_residual = 0.0;
    /// Step halvings needed for the last accepted step.
    int rejections_last = 0;
};

/// Pairs u0 with v = solve_chemical(u0). Throws StepError(Degeneracy) if
/// min v < v_floor.
SimState make_initial_state(const ScalarField& u0, const ModelParams& params,
                            const StepperConfig& cfg, const EllipticConfig& ecfg);

/// Face velocities chi * (v_R - v_L) / h / ((v_R + v_L) / 2); zero on
/// boundary faces. Throws StepError(Degeneracy) if any v < v_floor or v <= 0.
FaceField chemotactic_velocity(const ScalarField& v, double chi, double v_floor = 0.0);

/// Largest |w| over all faces.
double max_abs(const FaceField& w);

/// sigma * min(h_min^2 / (2 dim), h_min / max|w|, 1 / (a_sup + 2 b_sup max u)),
/// skipping guards with a zero denominator.
double propose_dt(double min_spacing, int dim, double max_velocity, double a_sup, double b_sup,
                  double max_u, double cfl_safety);

/// Same, reading everything from the state. Throws StepError(TimestepCollapse)
/// below dt_min.
double propose_dt(const SimState& state, const ModelParams& params, const StepperConfig& cfg);

/// One accepted step of at most `dt_cap`. The returned state carries the new
/// u and v = solve_chemical(u_new). Negative candidates trigger up to 40 dt
/// halvings; residual negatives no larger than 1e-14 max u are zeroed.
/// Throws StepError (TimestepCollapse, Overflow, Degeneracy) or SolverFailure.
SimState advance(const SimState& state, const ModelParams& params, const StepperConfig& cfg,
                 const EllipticConfig& ecfg,
                 double dt_cap = std::numeric_limits<double>::infinity());

/// The right-hand side div(grad u - u_up w) + u (a - b u) evaluated with the
/// given fields; advance() applies u + dt * rate.
ScalarField transport_reaction_rate(const ScalarField& u, const FaceField& w,
                                    const ScalarField& a, const ScalarField& b);

}  // namespace chemo
