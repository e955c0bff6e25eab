#include "chemo/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chemo/errors.hpp"
#include "chemo/format.hpp"

namespace chemo {

CoefficientSpec CoefficientSpec::constant(double c) {
    CoefficientSpec s;
    s.family = Family::Constant;
    s.scale = c;
    return s;
}

CoefficientSpec CoefficientSpec::separable(double c, double eps_x, double wave_number,
                                           double eps_t, double omega) {
    CoefficientSpec s;
    s.family = Family::Separable;
    s.scale = c;
    s.eps_x = eps_x;
    s.wave_number = wave_number;
    s.eps_t = eps_t;
    s.omega = omega;
    return s;
}

double CoefficientSpec::value(double x, double t, double lx) const {
    if (family == Family::Constant) return scale;
    const double space = 1.0 + eps_x * std::cos(wave_number * std::numbers::pi * x / lx);
    const double time = 1.0 + eps_t * std::sin(omega * t);
    return scale * space * time;
}

ScalarField CoefficientSpec::sample(const Grid& g, double t) const {
    if (family == Family::Constant) return ScalarField(g, scale);
    const double lx = g.extent(0);
    return ScalarField::from_function(g, [&](double x, double) { return value(x, t, lx); });
}

// With k = 0 the spatial factor is the constant 1 + eps_x; otherwise cos(k pi x / L)
// reaches both +1 (x = 0) and -1 somewhere on [0, L] when |k| >= 1. For
// 0 < |k| < 1 the minimum is cos(k pi). The same reasoning applies in time.
namespace {

struct Range {
    double lo, hi;
};

Range spatial_factor(double eps, double k) {
    if (k == 0.0) return {1.0 + eps, 1.0 + eps};
    const double kk = std::abs(k);
    const double cmin = kk >= 1.0 ? -1.0 : std::cos(kk * std::numbers::pi);
    const double lo = std::min(1.0 + eps, 1.0 + eps * cmin);
    const double hi = std::max(1.0 + eps, 1.0 + eps * cmin);
    return {lo, hi};
}

Range temporal_factor(double eps, double omega) {
    if (omega == 0.0) return {1.0, 1.0};
    return {1.0 - std::abs(eps), 1.0 + std::abs(eps)};
}

}  // namespace

double CoefficientSpec::inf() const {
    if (family == Family::Constant) return scale;
    return scale * spatial_factor(eps_x, wave_number).lo * temporal_factor(eps_t, omega).lo;
}

double CoefficientSpec::sup() const {
    if (family == Family::Constant) return scale;
    return scale * spatial_factor(eps_x, wave_number).hi * temporal_factor(eps_t, omega).hi;
}

void CoefficientSpec::validate() const {
    if (!std::isfinite(scale)) throw ParameterError("coefficient: scale must be finite");
    if (family == Family::Constant) {
        if (scale < 0.0) throw ParameterError("coefficient: constant must be >= 0");
        return;
    }
    if (!(scale > 0.0)) throw ParameterError("coefficient: separable scale must be positive");
    if (!(std::abs(eps_x) + std::abs(eps_t) < 1.0)) {
        throw ParameterError("coefficient: need |eps_x| + |eps_t| < 1");
    }
    if (!std::isfinite(wave_number) || !std::isfinite(omega)) {
        throw ParameterError("coefficient: wave number and omega must be finite");
    }
}

void ModelParams::validate() const {
    if (!(chi >= 0.0) || !std::isfinite(chi)) throw ParameterError("model: chi must be >= 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("model: mu must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("model: nu must be positive");
    a.validate();
    b.validate();
}

void StepperConfig::validate() const {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
        throw ParameterError("stepper: cfl_safety must lie in (0, 1]");
    }
    if (!(dt_min > 0.0)) throw ParameterError("stepper: dt_min must be positive");
    if (!(u_ceiling > 0.0)) throw ParameterError("stepper: u_ceiling must be positive");
    if (!(v_floor > 0.0)) throw ParameterError("stepper: v_floor must be positive");
}

namespace {

ChemicalSolution solve_checked(const ScalarField& u, const ModelParams& params,
                               const StepperConfig& cfg, const EllipticConfig& ecfg,
                               const ScalarField* warm) {
    ChemicalSolution sol = [&] {
        try {
            return solve_chemical(u, params.mu, params.nu, ecfg, warm);
        } catch (const DomainError& e) {
            throw StepError(StepFailure::Degeneracy, std::string("density lost its mass: ") + e.what());
        }
    }();
    const double vmin = sol.v.min();
    if (!(vmin >= cfg.v_floor)) {
        throw StepError(StepFailure::Degeneracy,
                        "min v = " + format_double(vmin) + " fell below v_floor");
    }
    return sol;
}

}  // namespace

SimState make_initial_state(const ScalarField& u0, const ModelParams& params,
                            const StepperConfig& cfg, const EllipticConfig& ecfg) {
    params.validate();
    cfg.validate();
    ChemicalSolution sol = solve_checked(u0, params, cfg, ecfg, nullptr);
    SimState s{0.0, 0, u0, std::move(sol.v), 0.0, sol.relative_residual, 0};
    return s;
}

FaceField chemotactic_velocity(const ScalarField& v, double chi, double v_floor) {
    const double vmin = v.min();
    if (!(vmin > 0.0) || vmin < v_floor) {
        throw StepError(StepFailure::Degeneracy,
                        "min v = " + format_double(vmin) + " is below the floor");
    }
    FaceField w = face_gradient(v);
    const Grid& g = v.grid;
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    // Face averages of v; boundary faces already hold zero gradient.
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const auto k = static_cast<std::size_t>(i + nx * j);
            const auto f = static_cast<std::size_t>(i + (nx + 1) * j);
            w.axis[0][f] *= chi / (0.5 * (v[k] + v[k - 1]));
        }
    }
    if (g.dim() == 2) {
        const auto snx = static_cast<std::size_t>(nx);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const auto k = static_cast<std::size_t>(i + nx * j);
                w.axis[1][k] *= chi / (0.5 * (v[k] + v[k - snx]));
            }
        }
    }
    return w;
}

double max_abs(const FaceField& w) {
    double m = 0.0;
    for (const auto& a : w.axis) {
        for (double x : a) m = std::max(m, std::abs(x));
    }
    return m;
}

double propose_dt(double min_spacing, int dim, double max_velocity, double a_sup, double b_sup,
                  double max_u, double cfl_safety) {
    double dt = min_spacing * min_spacing / (2.0 * dim);
    if (max_velocity > 0.0) dt = std::min(dt, min_spacing / max_velocity);
    const double reaction = a_sup + 2.0 * b_sup * max_u;
    if (reaction > 0.0) dt = std::min(dt, 1.0 / reaction);
    return cfl_safety * dt;
}

double propose_dt(const SimState& state, const ModelParams& params, const StepperConfig& cfg) {
    const FaceField w = chemotactic_velocity(state.v, params.chi, cfg.v_floor);
    const Grid& g = state.u.grid;
    const double dt = propose_dt(g.min_spacing(), g.dim(), max_abs(w), params.a.sup(),
                                 params.b.sup(), state.u.max(), cfg.cfl_safety);
    if (!(dt >= cfg.dt_min)) {
        throw StepError(StepFailure::TimestepCollapse,
                        "proposed dt " + format_double(dt) + " is below dt_min");
    }
    return dt;
}

ScalarField transport_reaction_rate(const ScalarField& u, const FaceField& w,
                                    const ScalarField& a, const ScalarField& b) {
    const Grid& g = u.grid;
    FaceField flux = face_gradient(u);
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const auto k = static_cast<std::size_t>(i + nx * j);
            const auto f = static_cast<std::size_t>(i + (nx + 1) * j);
            const double wf = w.axis[0][f];
            const double donor = wf > 0.0 ? u[k - 1] : u[k];
            flux.axis[0][f] -= donor * wf;
        }
    }
    if (g.dim() == 2) {
        const auto snx = static_cast<std::size_t>(nx);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const auto k = static_cast<std::size_t>(i + nx * j);
                const double wf = w.axis[1][k];
                const double donor = wf > 0.0 ? u[k - snx] : u[k];
                flux.axis[1][k] -= donor * wf;
            }
        }
    }
    ScalarField rate = divergence(g, flux);
    for (std::size_t k = 0; k < rate.size(); ++k) rate[k] += u[k] * (a[k] - b[k] * u[k]);
    return rate;
}

SimState advance(const SimState& state, const ModelParams& params, const StepperConfig& cfg,
                 const EllipticConfig& ecfg, double dt_cap) {
    const Grid& g = state.u.grid;
    const FaceField w = chemotactic_velocity(state.v, params.chi, cfg.v_floor);
    const double u_max = state.u.max();
    const double dt_proposed = propose_dt(g.min_spacing(), g.dim(), max_abs(w), params.a.sup(),
                                          params.b.sup(), u_max, cfg.cfl_safety);
    if (!(dt_proposed >= cfg.dt_min)) {
        throw StepError(StepFailure::TimestepCollapse,
                        "proposed dt " + format_double(dt_proposed) + " is below dt_min");
    }
    double dt = std::min(dt_proposed, dt_cap);

    const ScalarField a = params.a.sample(g, state.t);
    const ScalarField b = params.b.sample(g, state.t);
    const ScalarField rate = transport_reaction_rate(state.u, w, a, b);

    constexpr int kMaxHalvings = 40;
    const double clamp_limit = 1e-14 * u_max;
    ScalarField u_new(g);
    int halvings = 0;
    for (;; ++halvings) {
        double most_negative = 0.0;
        for (std::size_t k = 0; k < u_new.size(); ++k) {
            u_new[k] = state.u[k] + dt * rate[k];
            most_negative = std::min(most_negative, u_new[k]);
        }
        if (most_negative >= -clamp_limit) break;
        if (halvings == kMaxHalvings || dt * 0.5 < cfg.dt_min) {
            throw StepError(StepFailure::TimestepCollapse,
                            "positivity could not be restored by halving dt (dt = " +
                                format_double(dt) + ")");
        }
        dt *= 0.5;
    }
    for (double& x : u_new.values) {
        if (x < 0.0) x = 0.0;
    }

    if (!u_new.all_finite() || u_new.max() > cfg.u_ceiling) {
        throw StepError(StepFailure::Overflow,
                        "max u = " + format_double(u_new.max()) + " exceeds u_ceiling");
    }

    ChemicalSolution sol = solve_checked(u_new, params, cfg, ecfg, &state.v);
    SimState next{state.t + dt, state.step + 1, std::move(u_new), std::move(sol.v), dt,
                  sol.relative_residual, halvings};
    return next;
}

}  // namespace chemo
