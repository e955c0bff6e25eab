#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemo/errors.hpp"
#include "chemo/regimes.hpp"
#include "chemo/rng.hpp"

using namespace chemo;

TEST_CASE("threshold examples") {
    CHECK(threshold_value(2.0, 1.0) == 1.0);
    CHECK(threshold_value(3.0, 1.0) == 2.0);
    CHECK(threshold_value(1.0, 2.0) == 0.5);
    const ThresholdVerdict zero = boundedness_threshold(0.0, 1.0, 1e-9);
    CHECK(zero.threshold == 0.0);
    CHECK(zero.satisfied);

    const ThresholdVerdict edge = boundedness_threshold(2.0, 1.0, 1.0);
    CHECK_FALSE(edge.satisfied);
    CHECK(edge.on_boundary);
    CHECK(boundedness_threshold(3.0, 1.0, 2.5).satisfied);
    CHECK_FALSE(boundedness_threshold(3.0, 1.0, 1.5).satisfied);

    CHECK_THROWS_AS(boundedness_threshold(-1.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(boundedness_threshold(1.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("threshold is continuous at chi = 2") {
    for (double mu : {0.3, 1.0, 4.0}) {
        double prev = 1e300;
        for (double delta : {1e-1, 1e-3, 1e-5, 1e-7}) {
            const double jump = std::abs(threshold_value(2.0 - delta, mu) - threshold_value(2.0 + delta, mu));
            CHECK(jump < prev);
            prev = jump;
        }
        CHECK(prev < 1e-6 * mu);
    }
}

TEST_CASE("beta window examples") {
    const BetaWindow w = beta_window(3.0, 1.0, 2.5);
    CHECK(w.beta_minus == doctest::Approx(1.0 - 2.0 * std::sqrt(0.5)));
    CHECK(w.beta_plus == doctest::Approx(1.0 + 2.0 * std::sqrt(0.5)));
    CHECK(w.chosen_beta == doctest::Approx(0.5 * w.beta_plus));
    CHECK(w.chosen_beta > 0.0);
    CHECK(w.f_chosen < 0.0);

    const BetaWindow v = beta_window(1.0, 1.0, 0.5);
    CHECK(v.beta_plus == doctest::Approx(-1.0 + 2.0 * std::sqrt(0.5)));
    CHECK(v.beta_plus > 0.0);
    CHECK(v.chosen_beta == doctest::Approx(0.5 * v.beta_plus));
    const double p = 4.0 * v.chosen_beta / ((1.0 - v.chosen_beta) * (1.0 - v.chosen_beta));
    CHECK(v.p_hat == doctest::Approx(p));
    CHECK((p + 1.0) * v.chosen_beta * 1.0 / p - 0.5 < 0.0);
    CHECK(v.decay_gap == doctest::Approx((p + 1.0) * v.chosen_beta / p - 0.5));

    CHECK_THROWS_AS(beta_window(1.0, 1.0, 0.25), ThresholdNotMet);
    CHECK_THROWS_AS(beta_window(3.0, 1.0, 1.0), ThresholdNotMet);
}

TEST_CASE("chosen beta is nudged off chi") {
    // Pick R so that the window midpoint lands on chi: max(0, beta-) = 0 and
    // beta+ = 2 chi, i.e. chi - 2 + 2 sqrt(R/mu + 1 - chi) = 2 chi.
    const double chi = 1.5, mu = 1.0;
    const double root = (chi + 2.0) / 2.0;
    const double r = mu * (root * root - 1.0 + chi);
    const BetaWindow w = beta_window(chi, mu, r);
    CHECK(w.beta_plus == doctest::Approx(2.0 * chi));
    CHECK(w.chosen_beta != chi);
    CHECK(std::abs(w.chosen_beta - chi) == doctest::Approx(1e-6 * w.beta_plus).epsilon(1e-3));
    CHECK(std::isfinite(w.p_hat));
}

TEST_CASE("beta window properties on random parameters") {
    CounterRng rng(99, 0);
    int violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double chi = rng.uniform(0.0, 5.0);
        const double mu = rng.uniform(0.05, 10.0);
        const double r = threshold_value(chi, mu) + rng.uniform(1e-3, 5.0) * mu;
        const BetaWindow w = beta_window(chi, mu, r);
        const double disc = r / mu + 1.0 - chi;
        const double scale = mu * chi * chi + 4.0 * r;
        const double f = [&](double b) { return mu * b * b + 2.0 * mu * (2.0 - chi) * b + mu * chi * chi - 4.0 * r; }(w.chosen_beta);
        const bool ok = disc > 0.0 &&
                        std::abs(w.beta_minus - (chi - 2.0 - 2.0 * std::sqrt(disc))) <= 1e-12 * (1.0 + std::abs(chi)) &&
                        std::abs(beta_quadratic(chi, mu, r, w.beta_minus)) <= 1e-9 * scale &&
                        std::abs(beta_quadratic(chi, mu, r, w.beta_plus)) <= 1e-9 * scale &&
                        w.chosen_beta > std::max(0.0, w.beta_minus) && w.chosen_beta < w.beta_plus &&
                        w.chosen_beta != chi && f < 0.0 &&
                        (w.p_hat + 1.0) * w.chosen_beta * mu / w.p_hat - r < 0.0;
        if (!ok) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("exponent window bounds") {
    const double c = 1.5, alpha = 0.6, lambda = 0.05, h = 0.3;
    CHECK(p_lower_bound(c, h, alpha, lambda) ==
          doctest::Approx(std::max({2.0, h / lambda, (1.0 - h) / (1.0 - alpha - lambda), (3.0 * c - 2.0) / (2.0 - 2.0 * c * alpha)})));
    CHECK(p_lower_bound(c, h, alpha, lambda) == doctest::Approx(12.5));
    // [1.5 * 0.95 * 1.7 - (0.95 + 0.075)] / [1 - 0.9 - 0.05 + 0.045 + 0.00375]
    CHECK(p_upper_bound(c, h, alpha, lambda) == doctest::Approx((2.4225 - 1.025) / 0.09875));

    const Interval hi = h_interval(0.1);
    CHECK(hi.lo == doctest::Approx(0.5 - 0.11 / 0.9));
    CHECK(hi.hi == 0.5);
}

TEST_CASE("plan inequality flags follow their definitions") {
    const double c = 1.5, h = 0.3, alpha = 0.6, lambda = 0.05, p = 15.0, eps = 0.1;
    const auto f = plan_inequalities(c, h, alpha, lambda, p, eps);
    CHECK(f.size() == 11);
    // d = 19, l = 9, r = 0.45, m = 3.75, rd = 8.55, cd - c - d = 8.
    CHECK(f.at("lambda_range") == true);                // 0.05 < min(0.4, 0.25)
    CHECK(f.at("p_above_lower_bound") == true);         // 15 > 12.5
    CHECK(f.at("young_exponent_positive") == true);     // 15 > 10.45
    CHECK(f.at("gradient_weight_positive") == true);    // 2l - p + 2 = 5
    CHECK(f.at("gradient_term_subcritical") == true);   // 2m / (2 - c) = 15 < 16
    CHECK(f.at("young_conjugate_valid") == true);       // 8 > 0
    CHECK(f.at("ratio_weight_positive") == true);       // 16 - 8.55 = 7.45
    CHECK(f.at("ratio_term_subcritical") == false);     // 19 * 16 / 7.45 = 40.8 >= 32
    CHECK(f.at("remainder_term_subcritical") == false); // 28.5 * 4.55 / 8 = 16.2 >= 16
    CHECK(f.at("epsilon_exponent_gap") == false);
    CHECK(f.at("epsilon_ratio_gap") == false);

    const auto g = plan_inequalities(1.5, 0.3, 0.6, 0.5, 15.0, 0.1);
    CHECK(g.at("lambda_range") == false);
    const auto below = plan_inequalities(c, h, alpha, lambda, 10.0, eps);
    CHECK(below.at("p_above_lower_bound") == false);
    CHECK(below.at("gradient_term_subcritical") == false); // 2m / (2 - c) = 27 >= 11
}

TEST_CASE("the three subcritical slacks cancel identically") {
    // c * ratio + 2 * remainder + (1 - lambda) * gradient == 0 for every tuple, so the
    // gradient, ratio and remainder conditions are never simultaneously satisfiable.
    CounterRng rng(5, 1);
    for (int trial = 0; trial < 10000; ++trial) {
        const double c = rng.uniform(1.0, 2.0);
        const double alpha = rng.uniform(0.5, 1.0 / c);
        const double lambda = rng.uniform(0.0, 1.0);
        const double h = rng.uniform(-1.0, 0.5);
        const double p = rng.uniform(1.0, 1e4);
        const PlanSlacks s = plan_slacks(c, h, alpha, lambda, p);
        const double scale = c * std::abs(s.ratio) + 2.0 * std::abs(s.remainder) + std::abs(s.gradient) + 1.0;
        CHECK(std::abs(s.combination(c, lambda)) <= 1e-13 * scale);
        CHECK_FALSE((s.gradient > 0.0 && s.ratio > 0.0 && s.remainder > 0.0));
    }
}

TEST_CASE("the slacks match the corresponding flags") {
    CounterRng rng(6, 1);
    for (int trial = 0; trial < 2000; ++trial) {
        const double c = rng.uniform(1.05, 1.95);
        const double alpha = rng.uniform(0.5, 1.0 / c);
        const double lambda = 1.0 - c * alpha;
        const Interval hi = h_interval(lambda);
        const double h = hi.lo + rng.uniform() * (hi.hi - hi.lo);
        const double p = rng.uniform(2.0, 200.0);
        const PlanSlacks s = plan_slacks(c, h, alpha, lambda, p);
        const auto f = plan_inequalities(c, h, alpha, lambda, p, 0.0);
        // Exclude near-ties where rounding could flip a comparison.
        if (std::abs(s.gradient) > 1e-9) CHECK(f.at("gradient_term_subcritical") == (s.gradient > 0.0));
        if (std::abs(s.ratio) > 1e-9 && f.at("ratio_weight_positive")) {
            CHECK(f.at("ratio_term_subcritical") == (s.ratio > 0.0));
        }
        if (std::abs(s.remainder) > 1e-9 && f.at("young_conjugate_valid")) {
            CHECK(f.at("remainder_term_subcritical") == (s.remainder > 0.0));
        }
    }
}

TEST_CASE("lp plan preconditions") {
    CHECK_THROWS_AS(lp_parameter_plan(1.0, 0.5, 1e-3), ParameterError);
    CHECK_THROWS_AS(lp_parameter_plan(2.0, 0.5, 1e-3), ParameterError);
    CHECK_THROWS_AS(lp_parameter_plan(1.5, 0.0, 1e-3), ParameterError);
    CHECK_THROWS_AS(lp_parameter_plan(1.5, 1.0, 1e-3), ParameterError);
    CHECK_THROWS_AS(lp_parameter_plan(1.5, 0.5, 0.0), ParameterError);
    CHECK_THROWS_AS(select_lp_exponent(3), ParameterError);
}

TEST_CASE("the exponent window never opens") {
    for (double c : {1.1, 1.5, 1.9}) {
        for (double h_frac : {0.1, 0.5, 0.9}) {
            try {
                lp_parameter_plan(c, h_frac, 1e-3);
                FAIL("expected an infeasible window");
            } catch (const InfeasiblePlan& e) {
                CHECK(e.p_lower() >= e.p_upper());
            }
        }
    }
    CHECK_THROWS_AS(select_lp_exponent(1), InfeasiblePlan);
    CHECK_THROWS_AS(select_lp_exponent(2), InfeasiblePlan);
}

TEST_CASE("upper exponent bound approaches its small-gap limit") {
    // With h held fixed and lambda = 1 - c alpha, p_upper * lambda / h tends to (c(2 - h) - 1) / h
    // as alpha increases to 1/c.
    for (double c : {1.2, 1.5, 1.8}) {
        for (double h : {0.1, 0.3, 0.45}) {
            const double limit = (c * (2.0 - h) - 1.0) / h;
            double prev = 1e300;
            for (double gap : {1e-2, 1e-4, 1e-6}) {
                const double alpha = 1.0 / c - gap;
                const double lambda = 1.0 - c * alpha;
                const double ratio = p_upper_bound(c, h, alpha, lambda) / (h / lambda);
                const double err = std::abs(ratio - limit);
                CHECK(err < prev);
                prev = err;
            }
            CHECK(prev <= 1e-4 * limit);
            CHECK(limit > 1.0);
        }
    }
}

TEST_CASE("largest admissible epsilon sits on the boundary of its constraints") {
    CounterRng rng(8, 1);
    int checked = 0;
    for (int trial = 0; trial < 5000; ++trial) {
        const double c = rng.uniform(1.05, 1.95);
        const double alpha = rng.uniform(0.5, 1.0 / c);
        const double lambda = rng.uniform(0.01, 0.99);
        const double h = rng.uniform(-1.0, 0.5);
        const double p = rng.uniform(2.0, 50.0);
        const double d = 1.0 / lambda - 1.0, l = alpha * p, r = lambda * p - h;
        const double m = (2.0 * l - p + 2.0) * c / 2.0;
        const double young = c * d - c - d;
        const double eps_max = max_admissible_epsilon(c, h, alpha, lambda, p);
        if (!(young > 0.0)) {
            CHECK(eps_max == -std::numeric_limits<double>::infinity());
            continue;
        }
        ++checked;
        // Never positive: the subcritical conditions are jointly unsatisfiable.
        CHECK(eps_max <= 0.0);
        const double s = p + 1.0 - eps_max;
        const double worst = std::max({2.0 * m / (2.0 - c), r * d, c * d * (p - l - r - 1.0) / young});
        const double quad = s * s + (p + 1.0 - r * d - d) * s - (p + 1.0) * r * d;
        const double scale = 1.0 + s * s + std::abs(worst) + (p + 1.0) * std::abs(r * d);
        CHECK(s >= worst - 1e-9 * scale);
        CHECK(quad >= -1e-9 * scale);
        CHECK((std::abs(s - worst) <= 1e-9 * scale || std::abs(quad) <= 1e-9 * scale));
    }
    CHECK(checked > 100);
}
