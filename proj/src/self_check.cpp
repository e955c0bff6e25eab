#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>

#include "chemo/elliptic.hpp"
#include "chemo/engine.hpp"
#include "chemo/errors.hpp"
#include "chemo/rng.hpp"
#include "chemo/stepper.hpp"

namespace chemo {
namespace {

constexpr std::uint64_t kCheckSeed = 20240917;

std::string describe(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

double manufactured_error(int cells) {
    const double pi = std::numbers::pi;
    const double mu = 1.0;
    const Grid g = Grid::line(1.0, cells);
    const ScalarField source =
        ScalarField::from_function(g, [&](double x, double) { return (mu + pi * pi) * std::cos(pi * x); });
    const ChemicalSolution sol = solve_screened_poisson(source, mu, 1.0, EllipticConfig{});
    double err = 0.0;
    for (std::size_t k = 0; k < sol.v.size(); ++k) {
        err = std::max(err, std::abs(sol.v[k] - std::cos(pi * g.cell_center(k)[0])));
    }
    return err;
}

CheckItem elliptic_convergence() {
    const double e128 = manufactured_error(128);
    const double e256 = manufactured_error(256);
    const double ratio = e128 / e256;
    const double order = std::log2(ratio);
    return {"elliptic_convergence", ratio >= 3.4 && ratio <= 4.6 && order >= 1.8 && order <= 2.2,
            describe("max error %.3e (128) / %.3e (256), ratio %.4f", e128, e256, ratio) +
                describe(", order %.4f", order)};
}

ScalarField random_density(const Grid& g, CounterRng& rng) {
    ScalarField u(g);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0);
    u[0] += 0.1;
    return u;
}

CheckItem elliptic_mean_identity() {
    CounterRng rng(kCheckSeed, 1);
    const Grid g1 = Grid::line(2.0, 64);
    const Grid g2 = Grid::rect(1.0, 1.0, 24, 24);
    int violations = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarField u = random_density(trial % 2 == 0 ? g1 : g2, rng);
        const double mu = rng.uniform(0.2, 3.0);
        const double nu = rng.uniform(0.2, 3.0);
        const ChemicalSolution sol = solve_chemical(u, mu, nu, EllipticConfig{});
        const double target = nu * integrate(u);
        const double rel = std::abs(mu * integrate(sol.v) - target) / target;
        worst = std::max(worst, rel);
        if (rel > 1e-9 || !(sol.v.min() > 0.0)) ++violations;
    }
    return {"elliptic_mean_identity", violations == 0,
            describe("%.0f violations in 100 solves, worst relative mismatch %.3e", violations, worst)};
}

CheckItem mass_identity() {
    const Grid g = Grid::line(1.0, 128);
    const ScalarField u0 = ScalarField::from_function(
        g, [](double x, double) { return 0.2 + std::exp(-(x - 0.4) * (x - 0.4) / 0.02); });
    ModelParams params;
    params.chi = 1.5;
    params.a = CoefficientSpec::constant(1.0);
    params.b = CoefficientSpec::constant(0.5);
    const StepperConfig scfg;
    const EllipticConfig ecfg;
    const SimState s0 = make_initial_state(u0, params, scfg, ecfg);
    const SimState s1 = advance(s0, params, scfg, ecfg);
    ScalarField reaction(g);
    for (std::size_t k = 0; k < g.cell_count(); ++k) reaction[k] = u0[k] * (1.0 - 0.5 * u0[k]);
    const double expected = integrate(u0) + s1.dt_last * integrate(reaction);
    const double err = std::abs(integrate(s1.u) - expected) / integrate(u0);
    return {"mass_identity", err <= 1e-12,
            describe("one step: |mass change - dt * reaction integral| / mass = %.3e", err)};
}

CheckItem logistic_oracle() {
    const Grid g = Grid::line(1.0, 32);
    ModelParams params;
    params.chi = 0.0;
    SimState s = make_initial_state(ScalarField(g, 0.1), params, StepperConfig{}, EllipticConfig{});
    const double t_end = 5.0;
    while (s.t < t_end) {
        const double cap = t_end - s.t;
        s = advance(s, params, StepperConfig{}, EllipticConfig{}, cap);
        if (s.dt_last >= cap) s.t = t_end;
    }
    const double e5 = std::exp(5.0);
    const double exact = 0.1 * e5 / (1.0 + 0.1 * (e5 - 1.0));
    double worst = 0.0;
    for (double x : s.u.values) worst = std::max(worst, std::abs(x - exact) / exact);
    return {"logistic_oracle", worst <= 1e-4,
            describe("u(5) vs logistic %.10f: relative error %.3e", exact, worst)};
}

CheckItem reverse_holder() {
    CounterRng rng(kCheckSeed, 2);
    const Grid g = Grid::line(1.0, 50);
    int violations = 0;
    for (double p : {1.5, 2.0, 3.0}) {
        for (int trial = 0; trial < 1000; ++trial) {
            ScalarField f(g), h(g);
            for (std::size_t k = 0; k < g.cell_count(); ++k) {
                f[k] = std::exp(rng.uniform(-4.0, 4.0));
                h[k] = std::exp(rng.uniform(-4.0, 4.0));
            }
            if (!reverse_holder_check(f, h, p).pass) ++violations;
        }
    }
    return {"reverse_holder", violations == 0,
            describe("%.0f violations in 3000 trials (p = 1.5, 2, 3)", violations)};
}

CheckItem regimes_property() {
    CounterRng rng(kCheckSeed, 3);
    int violations = 0;
    double worst_residual = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double chi = rng.uniform(0.0, 4.0);
        const double mu = rng.uniform(0.1, 5.0);
        const double thr = threshold_value(chi, mu);
        if (trial % 4 == 0) {
            const double r = thr * rng.uniform(0.0, 0.999);
            try {
                beta_window(chi, mu, r);
                ++violations;
            } catch (const ThresholdNotMet&) {
            }
            continue;
        }
        const double r = thr * rng.uniform(1.001, 4.0) + rng.uniform(1e-3, 1.0);
        try {
            const BetaWindow w = beta_window(chi, mu, r);
            const double scale = mu * chi * chi + 4.0 * r;
            const double residual = std::max(std::abs(beta_quadratic(chi, mu, r, w.beta_minus)),
                                             std::abs(beta_quadratic(chi, mu, r, w.beta_plus))) /
                                    scale;
            worst_residual = std::max(worst_residual, residual);
            const bool ok = residual <= 1e-9 && w.beta_minus < w.beta_plus && w.beta_plus > 0.0 &&
                            w.chosen_beta > std::max(0.0, w.beta_minus) &&
                            w.chosen_beta < w.beta_plus && w.f_chosen < 0.0 && w.p_hat > 0.0 &&
                            w.decay_gap < 0.0;
            if (!ok) ++violations;
        } catch (const std::exception&) {
            ++violations;
        }
    }
    return {"regimes_property", violations == 0,
            describe("%.0f violations in 10000 trials, worst scaled root residual %.3e", violations,
                     worst_residual)};
}

template <class F>
CheckItem guarded(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {name, false, std::string("threw: ") + e.what()};
    }
}

}  // namespace

std::vector<CheckItem> self_check() {
    return {
        guarded("elliptic_convergence", elliptic_convergence),
        guarded("elliptic_mean_identity", elliptic_mean_identity),
        guarded("mass_identity", mass_identity),
        guarded("logistic_oracle", logistic_oracle),
        guarded("reverse_holder", reverse_holder),
        guarded("regimes_property", regimes_property),
    };
}

}  // namespace chemo
