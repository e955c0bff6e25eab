#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chemo/diagnostics.hpp"
#include "chemo/errors.hpp"
#include "chemo/rng.hpp"
#include "chemo/stepper.hpp"

using namespace chemo;

namespace {

ScalarField random_positive(const Grid& g, std::uint64_t seed, double lo, double hi) {
    CounterRng rng(seed, 21);
    ScalarField u(g);
    for (auto& x : u.values) x = rng.uniform(lo, hi);
    return u;
}

ScalarField bump(const Grid& g, double base, double height, double width) {
    return ScalarField::from_function(g, [&](double x, double y) {
        double r2 = (x - 0.4 * g.extent(0)) * (x - 0.4 * g.extent(0));
        if (g.dim() == 2) r2 += (y - 0.6 * g.extent(1)) * (y - 0.6 * g.extent(1));
        return base + height * std::exp(-r2 / (width * width));
    });
}

ModelParams model(double chi, double a, double b) {
    ModelParams p;
    p.chi = chi;
    p.a = CoefficientSpec::constant(a);
    p.b = CoefficientSpec::constant(b);
    return p;
}

}  // namespace

TEST_CASE("coefficient specs and their bounds") {
    const CoefficientSpec c = CoefficientSpec::constant(2.5);
    CHECK(c.inf() == 2.5);
    CHECK(c.sup() == 2.5);
    CHECK(c.value(0.3, 7.0, 1.0) == 2.5);

    const CoefficientSpec s = CoefficientSpec::separable(2.0, 0.3, 1.0, -0.2, 3.0);
    CHECK(s.inf() == doctest::Approx(2.0 * 0.7 * 0.8));
    CHECK(s.sup() == doctest::Approx(2.0 * 1.3 * 1.2));
    CHECK(s.value(0.0, 0.0, 2.0) == doctest::Approx(2.6));

    // Sampled values never leave [inf, sup] and come close to both ends.
    for (const CoefficientSpec& spec : {s, CoefficientSpec::separable(1.0, -0.4, 0.5, 0.1, 2.0),
                                        CoefficientSpec::separable(1.0, 0.4, 0.0, 0.5, 0.0),
                                        CoefficientSpec::separable(3.0, 0.2, 3.0, 0.0, 1.0)}) {
        double lo = 1e300, hi = -1e300;
        for (int ix = 0; ix <= 400; ++ix) {
            for (int it = 0; it <= 400; ++it) {
                const double x = 2.0 * ix / 400.0;
                const double t = 2.0 * std::numbers::pi * it / 400.0 / (spec.omega == 0.0 ? 1.0 : spec.omega);
                const double val = spec.value(x, t, 2.0);
                lo = std::min(lo, val);
                hi = std::max(hi, val);
            }
        }
        CHECK(lo >= spec.inf() - 1e-12);
        CHECK(hi <= spec.sup() + 1e-12);
        CHECK(lo == doctest::Approx(spec.inf()).epsilon(1e-3));
        CHECK(hi == doctest::Approx(spec.sup()).epsilon(1e-3));
    }

    CHECK_THROWS_AS(CoefficientSpec::separable(1.0, 0.6, 1.0, 0.4, 1.0).validate(), ParameterError);
    CHECK_THROWS_AS(CoefficientSpec::separable(0.0, 0.1, 1.0, 0.1, 1.0).validate(), ParameterError);
    CHECK_THROWS_AS(CoefficientSpec::constant(-1.0).validate(), ParameterError);
    CHECK_NOTHROW(CoefficientSpec::constant(0.0).validate());
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.mu = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = ModelParams{};
    p.chi = -0.5;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    StepperConfig c;
    c.cfl_safety = 1.5;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = StepperConfig{};
    c.v_floor = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("chemotactic velocity") {
    const Grid g = Grid::line(1.0, 64);
    const FaceField flat = chemotactic_velocity(ScalarField(g, 2.0), 3.0);
    CHECK(max_abs(flat) == 0.0);

    const ScalarField ev = ScalarField::from_function(g, [](double x, double) { return std::exp(x); });
    CHECK(max_abs(chemotactic_velocity(ev, 0.0)) == 0.0);

    const double chi = 1.7, h = g.spacing(0);
    const FaceField w = chemotactic_velocity(ev, chi);
    CHECK(w.axis[0].front() == 0.0);
    CHECK(w.axis[0].back() == 0.0);
    // Stencil value is chi * (2 / h) tanh(h / 2) = chi (1 - h^2 / 12 + ...).
    for (std::size_t f = 1; f < 64; ++f) {
        CHECK(std::abs(w.axis[0][f] - chi) <= chi * h * h / 12.0 * 1.01);
        CHECK(w.axis[0][f] == doctest::Approx(chi * 2.0 / h * std::tanh(h / 2.0)).epsilon(1e-12));
    }

    ScalarField low = ev;
    low[5] = 1e-13;
    CHECK_THROWS_AS(chemotactic_velocity(low, 1.0, 1e-12), StepError);
    low[5] = 0.0;
    try {
        chemotactic_velocity(low, 1.0);
        FAIL("expected degeneracy");
    } catch (const StepError& e) {
        CHECK(e.kind() == StepFailure::Degeneracy);
    }
}

TEST_CASE("time step proposal") {
    CHECK(propose_dt(1.0 / 128.0, 1, 0.0, 1.0, 1.0, 1.0, 0.4) == doctest::Approx(0.4 / 32768.0).epsilon(1e-15));
    // Advection guard takes over for large velocities.
    CHECK(propose_dt(0.01, 1, 1e4, 1.0, 1.0, 1.0, 0.5) == doctest::Approx(0.5 * 0.01 / 1e4));
    // Reaction guard when diffusion and advection are mild.
    CHECK(propose_dt(1.0, 2, 0.0, 10.0, 5.0, 1.0, 1.0) == doctest::Approx(1.0 / 20.0));
    // Zero denominators skip their guards.
    CHECK(propose_dt(0.1, 1, 0.0, 0.0, 0.0, 3.0, 1.0) == doctest::Approx(0.005));

    const Grid g = Grid::line(1.0, 128);
    SimState s = make_initial_state(ScalarField(g, 1.0), model(1.0, 1.0, 1.0), StepperConfig{}, EllipticConfig{});
    CHECK(propose_dt(s, model(1.0, 1.0, 1.0), StepperConfig{}) == doctest::Approx(0.4 / 32768.0));
    StepperConfig strict;
    strict.dt_min = 1e-3;
    try {
        propose_dt(s, model(1.0, 1.0, 1.0), strict);
        FAIL("expected collapse");
    } catch (const StepError& e) {
        CHECK(e.kind() == StepFailure::TimestepCollapse);
    }
}

TEST_CASE("homogeneous steady state is preserved") {
    for (const Grid& g : {Grid::line(1.0, 50), Grid::rect(1.0, 1.0, 12, 12)}) {
        ModelParams p = model(2.3, 1.0, 1.0);
        p.nu = 3.0;
        p.mu = 1.5;
        SimState s = make_initial_state(ScalarField(g, 1.0), p, StepperConfig{}, EllipticConfig{});
        for (int n = 0; n < 200; ++n) s = advance(s, p, StepperConfig{}, EllipticConfig{});
        for (double x : s.u.values) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
        for (double x : s.v.values) CHECK(x == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(s.step == 200);
    }
}

TEST_CASE("logistic oracle with chi = 0") {
    const Grid g = Grid::line(1.0, 16);
    const ModelParams p = model(0.0, 1.0, 1.0);
    SimState s = make_initial_state(ScalarField(g, 0.1), p, StepperConfig{}, EllipticConfig{});
    while (s.t < 5.0) {
        const double cap = 5.0 - s.t;
        s = advance(s, p, StepperConfig{}, EllipticConfig{}, cap);
        if (s.dt_last >= cap) s.t = 5.0;
    }
    const double exact = 0.1 * std::exp(5.0) / (1.0 + 0.1 * (std::exp(5.0) - 1.0));
    for (double x : s.u.values) CHECK(std::abs(x - exact) <= 1e-4 * exact);
}

TEST_CASE("discrete mass identity for single steps") {
    for (const Grid& g : {Grid::line(2.0, 80), Grid::rect(1.0, 1.0, 16, 20)}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            ModelParams p = model(0.5 + 0.3 * static_cast<double>(seed), 1.3, 0.7);
            if (seed % 2 == 1) {
                p.a = CoefficientSpec::separable(1.3, 0.4, 2.0, 0.3, 1.7);
                p.b = CoefficientSpec::separable(0.7, -0.2, 1.0, 0.1, 0.5);
            }
            SimState s = make_initial_state(random_positive(g, seed, 0.05, 3.0), p, StepperConfig{}, EllipticConfig{});
            s.t = 0.37 * static_cast<double>(seed);
            for (int n = 0; n < 3; ++n) {
                const ScalarField a = p.a.sample(g, s.t);
                const ScalarField b = p.b.sample(g, s.t);
                ScalarField reaction(g);
                for (std::size_t k = 0; k < g.cell_count(); ++k) reaction[k] = s.u[k] * (a[k] - b[k] * s.u[k]);
                const double before = integrate(s.u);
                const SimState next = advance(s, p, StepperConfig{}, EllipticConfig{});
                CHECK(std::abs(integrate(next.u) - before - next.dt_last * integrate(reaction)) <= 1e-12 * before);
                s = next;
            }
        }
    }
}

TEST_CASE("transport alone conserves mass and keeps u nonnegative") {
    const Grid g = Grid::line(1.0, 100);
    const ModelParams p = model(4.0, 0.0, 0.0);
    SimState s = make_initial_state(bump(g, 0.01, 5.0, 0.05), p, StepperConfig{}, EllipticConfig{});
    const double m0 = integrate(s.u);
    for (int n = 0; n < 2000; ++n) {
        s = advance(s, p, StepperConfig{}, EllipticConfig{});
        CHECK(s.u.min() >= 0.0);
    }
    CHECK(std::abs(integrate(s.u) - m0) <= 1e-12 * m0);

    const Grid g2 = Grid::rect(1.0, 1.0, 20, 20);
    SimState s2 = make_initial_state(bump(g2, 0.01, 5.0, 0.1), p, StepperConfig{}, EllipticConfig{});
    const double m2 = integrate(s2.u);
    for (int n = 0; n < 300; ++n) s2 = advance(s2, p, StepperConfig{}, EllipticConfig{});
    CHECK(std::abs(integrate(s2.u) - m2) <= 1e-12 * m2);
}

TEST_CASE("pure diffusion obeys the discrete maximum principle") {
    const Grid g = Grid::rect(1.0, 1.0, 16, 16);
    const ModelParams p = model(0.0, 0.0, 0.0);
    SimState s = make_initial_state(random_positive(g, 5, 0.0, 2.0), p, StepperConfig{}, EllipticConfig{});
    double prev_max = s.u.max(), prev_min = s.u.min();
    for (int n = 0; n < 200; ++n) {
        s = advance(s, p, StepperConfig{}, EllipticConfig{});
        CHECK(s.u.max() <= prev_max + 1e-15);
        CHECK(s.u.min() >= prev_min - 1e-15);
        prev_max = s.u.max();
        prev_min = s.u.min();
    }
}

TEST_CASE("mass stays below the logistic ceiling") {
    const Grid g = Grid::line(1.0, 64);
    const ModelParams p = model(2.0, 0.8, 1.6);
    SimState s = make_initial_state(bump(g, 0.05, 4.0, 0.1), p, StepperConfig{}, EllipticConfig{});
    const double m_star = mass_ceiling(integrate(s.u), p.a.sup(), p.b.inf(), g.measure());
    for (int n = 0; n < 3000; ++n) {
        s = advance(s, p, StepperConfig{}, EllipticConfig{});
        CHECK(integrate(s.u) <= m_star * (1.0 + 1e-8));
    }
}

TEST_CASE("advance respects the time cap and keeps v consistent with u") {
    const Grid g = Grid::line(1.0, 32);
    const ModelParams p = model(1.0, 1.0, 1.0);
    const SimState s = make_initial_state(bump(g, 0.2, 1.0, 0.2), p, StepperConfig{}, EllipticConfig{});
    const SimState next = advance(s, p, StepperConfig{}, EllipticConfig{}, 1e-6);
    CHECK(next.dt_last == 1e-6);
    CHECK(next.t == doctest::Approx(1e-6));
    const ScalarField v = solve_chemical(next.u, p.mu, p.nu, EllipticConfig{}).v;
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(next.v[k] == doctest::Approx(v[k]).epsilon(1e-9));
}

TEST_CASE("overflow and degeneracy are reported by kind") {
    const Grid g = Grid::line(1.0, 16);
    StepperConfig cfg;
    cfg.u_ceiling = 1.5;
    const ModelParams growth = model(0.0, 3.0, 1.0);
    SimState s = make_initial_state(ScalarField(g, 1.0), growth, cfg, EllipticConfig{});
    bool overflow = false;
    try {
        for (int n = 0; n < 100000; ++n) s = advance(s, growth, cfg, EllipticConfig{});
    } catch (const StepError& e) {
        overflow = e.kind() == StepFailure::Overflow;
    }
    CHECK(overflow);

    StepperConfig floor_cfg;
    floor_cfg.v_floor = 10.0;
    try {
        make_initial_state(ScalarField(g, 1.0), model(1.0, 1.0, 1.0), floor_cfg, EllipticConfig{});
        FAIL("expected degeneracy");
    } catch (const StepError& e) {
        CHECK(e.kind() == StepFailure::Degeneracy);
    }
}

TEST_CASE("steep profiles stay nonnegative with exact mass bookkeeping") {
    const Grid g = Grid::line(1.0, 200);
    const ModelParams p = model(6.0, 1.0, 1.0);
    ScalarField u(g, 0.0);
    for (std::size_t k = 90; k < 110; ++k) u[k] = 10.0;
    StepperConfig cfg;
    cfg.cfl_safety = 1.0;
    SimState s = make_initial_state(u, p, cfg, EllipticConfig{});
    const double m0 = integrate(s.u);
    double reaction_sum = 0.0;
    for (int n = 0; n < 500; ++n) {
        ScalarField r(g);
        for (std::size_t k = 0; k < g.cell_count(); ++k) r[k] = s.u[k] * (1.0 - s.u[k]);
        const SimState next = advance(s, p, cfg, EllipticConfig{});
        reaction_sum += next.dt_last * integrate(r);
        CHECK(next.u.min() >= 0.0);
        s = next;
    }
    CHECK(integrate(s.u) == doctest::Approx(m0 + reaction_sum).epsilon(1e-10));
}
