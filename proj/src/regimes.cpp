#include "chemo/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemo/errors.hpp"
#include "chemo/format.hpp"

namespace chemo {

double threshold_value(double chi, double mu) {
    return chi <= 2.0 ? mu * chi * chi / 4.0 : mu * (chi - 1.0);
}

ThresholdVerdict boundedness_threshold(double chi, double mu, double a_inf) {
    if (!(chi >= 0.0) || !std::isfinite(chi)) throw ParameterError("threshold: chi must be >= 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("threshold: mu must be positive");
    ThresholdVerdict v;
    v.chi = chi;
    v.mu = mu;
    v.a_inf = a_inf;
    v.threshold = threshold_value(chi, mu);
    v.satisfied = a_inf > v.threshold;
    v.on_boundary = a_inf == v.threshold;
    return v;
}

double beta_quadratic(double chi, double mu, double r, double beta) {
    return mu * beta * beta + 2.0 * mu * (2.0 - chi) * beta + mu * chi * chi - 4.0 * r;
}

BetaWindow beta_window(double chi, double mu, double r) {
    const ThresholdVerdict tv = boundedness_threshold(chi, mu, r);
    if (!tv.satisfied) {
        throw ThresholdNotMet("beta_window: R = " + format_double(r) +
                              " does not exceed the threshold " + format_double(tv.threshold));
    }
    const double disc = r / mu + 1.0 - chi;
    // Positive whenever R is above the threshold; guard against roundoff anyway.
    if (!(disc > 0.0)) {
        throw ThresholdNotMet("beta_window: discriminant " + format_double(disc) +
                              " is not positive");
    }
    BetaWindow w;
    w.r = r;
    const double root = 2.0 * std::sqrt(disc);
    w.beta_minus = chi - 2.0 - root;
    w.beta_plus = chi - 2.0 + root;
    const double lo = std::max(0.0, w.beta_minus);
    double beta = 0.5 * (lo + w.beta_plus);
    if (std::abs(beta - chi) <= 1e-6 * w.beta_plus) beta = chi - 1e-6 * w.beta_plus;
    w.chosen_beta = beta;
    w.p_hat = 4.0 * beta / ((chi - beta) * (chi - beta));
    w.f_chosen = beta_quadratic(chi, mu, r, beta);
    w.decay_gap = (w.p_hat + 1.0) * beta * mu / w.p_hat - r;
    if (!(beta > lo && beta < w.beta_plus) || !(w.f_chosen < 0.0) || !(w.decay_gap < 0.0)) {
        throw ThresholdNotMet("beta_window: no interior beta with f(beta) < 0 at R = " +
                              format_double(r) + " (window too narrow for double precision)");
    }
    return w;
}

double p_lower_bound(double c, double h, double alpha, double lambda) {
    return std::max({2.0, h / lambda, (1.0 - h) / (1.0 - alpha - lambda),
                     (3.0 * c - 2.0) / (2.0 - 2.0 * c * alpha)});
}

double p_upper_bound(double c, double h, double alpha, double lambda) {
    const double num = c * (1.0 - lambda) * (2.0 - h) - (1.0 - lambda + c * lambda);
    const double den =
        1.0 - c * alpha - lambda + alpha * c * lambda + c * lambda * lambda;
    return num / den;
}

Interval h_interval(double lambda) {
    return {0.5 - (lambda * lambda + lambda) / (1.0 - lambda), 0.5};
}

bool LpPlan::all_flags() const {
    return !flags.empty() &&
           std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

std::map<std::string, bool> plan_inequalities(double c, double h, double alpha, double lambda,
                                              double p, double epsilon) {
    const double d = 1.0 / lambda - 1.0;
    const double l = alpha * p;
    const double r = lambda * p - h;
    const double m = (2.0 * l - p + 2.0) * c / 2.0;
    const double young = c * d - c - d;
    const double rd_gap = p + 1.0 - r * d;

    std::map<std::string, bool> f;
    f["lambda_range"] =
        lambda > 0.0 && lambda < std::min(1.0 - alpha, (c - 1.0) / (2.0 * c - 1.0));
    f["p_above_lower_bound"] = p > p_lower_bound(c, h, alpha, lambda);
    f["young_exponent_positive"] = p > l + r + 1.0;
    f["gradient_weight_positive"] = 2.0 * l - p + 2.0 > 0.0 && m > 0.0;
    f["gradient_term_subcritical"] = 2.0 * m / (2.0 - c) < p + 1.0;
    f["young_conjugate_valid"] = young > 0.0;
    f["ratio_weight_positive"] = rd_gap > 0.0;
    f["ratio_term_subcritical"] = rd_gap > 0.0 && d * (p + 1.0) / rd_gap < 2.0 * p + 2.0;
    f["remainder_term_subcritical"] =
        young > 0.0 && c * d * (p - l - r - 1.0) / young < p + 1.0;

    const double s = p + 1.0 - epsilon;
    const double worst = std::max({2.0 * m / (2.0 - c), r * d,
                                   young > 0.0 ? c * d * (p - l - r - 1.0) / young
                                               : std::numeric_limits<double>::infinity()});
    f["epsilon_exponent_gap"] = epsilon > 0.0 && s > worst;
    f["epsilon_ratio_gap"] =
        epsilon > 0.0 && s - r * d > 0.0 && 2.0 * p + 2.0 - epsilon > d * s / (s - r * d);
    return f;
}

double max_admissible_epsilon(double c, double h, double alpha, double lambda, double p) {
    const double d = 1.0 / lambda - 1.0;
    const double l = alpha * p;
    const double r = lambda * p - h;
    const double m = (2.0 * l - p + 2.0) * c / 2.0;
    const double young = c * d - c - d;
    if (!(young > 0.0)) return -std::numeric_limits<double>::infinity();
    const double from_exponents =
        p + 1.0 - std::max({2.0 * m / (2.0 - c), r * d, c * d * (p - l - r - 1.0) / young});
    // With s = p + 1 - eps the ratio condition is s^2 + (p + 1 - rd - d) s - (p + 1) rd > 0,
    // i.e. s above the positive root.
    const double bq = p + 1.0 - r * d - d;
    const double s_root = 0.5 * (-bq + std::sqrt(bq * bq + 4.0 * (p + 1.0) * r * d));
    const double from_ratio = p + 1.0 - s_root;
    return std::min(from_exponents, from_ratio);
}

LpPlan lp_parameter_plan(double c, double h_frac, double alpha_gap) {
    if (!(c > 1.0 && c < 2.0)) throw ParameterError("lp plan: c must lie in (1, 2)");
    if (!(h_frac > 0.0 && h_frac < 1.0)) throw ParameterError("lp plan: h_frac must lie in (0, 1)");
    if (!(alpha_gap > 0.0) || !std::isfinite(alpha_gap)) {
        throw ParameterError("lp plan: alpha_gap must be positive");
    }

    constexpr int kMaxShrinks = 60;
    double gap = alpha_gap;
    double last_lower = std::numeric_limits<double>::quiet_NaN();
    double last_upper = std::numeric_limits<double>::quiet_NaN();
    for (int shrink = 0; shrink <= kMaxShrinks; ++shrink, gap *= 0.5) {
        const double alpha = 1.0 / c - gap;
        const double lambda = 1.0 - c * alpha;
        if (!(alpha > 0.5) ||
            !(lambda > 0.0 && lambda < std::min(1.0 - alpha, (c - 1.0) / (2.0 * c - 1.0)))) {
            continue;
        }
        const Interval hi = h_interval(lambda);
        const double h = hi.lo + h_frac * (hi.hi - hi.lo);
        last_lower = p_lower_bound(c, h, alpha, lambda);
        last_upper = p_upper_bound(c, h, alpha, lambda);
        if (!(last_lower < last_upper)) continue;

        LpPlan plan;
        plan.c = c;
        plan.alpha = alpha;
        plan.alpha_gap = gap;
        plan.lambda = lambda;
        plan.h = h;
        plan.d = 1.0 / lambda - 1.0;
        plan.p_lower = last_lower;
        plan.p_upper = last_upper;
        plan.p = 0.5 * (last_lower + last_upper);
        plan.l = alpha * plan.p;
        plan.r = lambda * plan.p - h;
        plan.m = (2.0 * plan.l - plan.p + 2.0) * c / 2.0;
        plan.epsilon_max = max_admissible_epsilon(c, h, alpha, lambda, plan.p);
        plan.epsilon = plan.epsilon_max > 0.0 ? 0.5 * plan.epsilon_max : 0.0;
        plan.shrinks = shrink;
        plan.flags = plan_inequalities(c, h, alpha, lambda, plan.p, plan.epsilon);
        return plan;
    }
    throw InfeasiblePlan("lp plan: exponent window (p_lower, p_upper) stayed empty after " +
                             std::to_string(kMaxShrinks) + " halvings of alpha_gap (last p_lower = " +
                             format_double(last_lower) + ", p_upper = " +
                             format_double(last_upper) + ")",
                         last_lower, last_upper);
}

LpPlan select_lp_exponent(int dim) {
    if (dim != 1 && dim != 2) throw ParameterError("select_lp_exponent: dim must be 1 or 2");
    const double p_min = std::max(static_cast<double>(dim), 3.0);
    double best_lower = std::numeric_limits<double>::quiet_NaN();
    double best_upper = std::numeric_limits<double>::quiet_NaN();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int ci = 1; ci <= 9; ++ci) {
        const double c = 1.0 + 0.1 * ci;
        for (int hi = 1; hi <= 9; ++hi) {
            const double h_frac = 0.1 * hi;
            try {
                LpPlan plan = lp_parameter_plan(c, h_frac, 0.5 * (1.0 / c - 0.5));
                if (plan.all_flags() && plan.p > p_min) return plan;
                if (plan.p_lower / plan.p_upper < best_ratio) {
                    best_ratio = plan.p_lower / plan.p_upper;
                    best_lower = plan.p_lower;
                    best_upper = plan.p_upper;
                }
            } catch (const InfeasiblePlan& e) {
                if (e.p_lower() / e.p_upper() < best_ratio) {
                    best_ratio = e.p_lower() / e.p_upper();
                    best_lower = e.p_lower();
                    best_upper = e.p_upper();
                }
            }
        }
    }
    throw InfeasiblePlan("select_lp_exponent: no (c, h_frac) in the search grid yields a plan "
                         "with every inequality true and p > " + format_double(p_min) +
                             " (closest window: p_lower = " + format_double(best_lower) +
                             ", p_upper = " + format_double(best_upper) + ")",
                         best_lower, best_upper);
}

PlanSlacks plan_slacks(double c, double h, double alpha, double lambda, double p) {
    PlanSlacks s;
    s.gradient = (2.0 - 2.0 * c * alpha) * p - (3.0 * c - 2.0);
    s.ratio = 2.0 * (lambda * lambda * p + lambda + (1.0 - lambda) * h) - (1.0 - lambda);
    s.remainder = c * (1.0 - lambda) * (2.0 - h) - (1.0 - lambda + c * lambda) -
                  p * ((1.0 - c * alpha) * (1.0 - lambda) + c * lambda * lambda);
    return s;
}

}  // namespace chemo
