#pragma once

/// @file regimes.hpp
/// @brief Closed-form parameter algebra: the boundedness threshold on a_inf,
/// the negative-moment exponent window, and the L^p exponent plan.

#include <map>
#include <string>

namespace chemo {

/// mu chi^2 / 4 for chi <= 2, mu (chi - 1) above. Both branches give mu at chi = 2.
double threshold_value(double chi, double mu);

struct ThresholdVerdict {
    double chi = 0.0;
    double mu = 0.0;
    double a_inf = 0.0;
    double threshold = 0.0;
    /// a_inf > threshold (strict).
    bool satisfied = false;
    /// a_inf == threshold: the strict criterion says nothing either way.
    bool on_boundary = false;
};

/// Requires chi >= 0 and mu > 0 (ParameterError otherwise).
ThresholdVerdict boundedness_threshold(double chi, double mu, double a_inf);

/// f(beta) = mu beta^2 + 2 mu (2 - chi) beta + mu chi^2 - 4R.
double beta_quadratic(double chi, double mu, double r, double beta);

struct BetaWindow {
    double r = 0.0;
    double beta_minus = 0.0;
    double beta_plus = 0.0;
    double chosen_beta = 0.0;
    /// 4 beta / (chi - beta)^2 at chosen_beta.
    double p_hat = 0.0;
    /// f(chosen_beta); negative.
    double f_chosen = 0.0;
    /// (p_hat + 1) beta mu / p_hat - R; negative.
    double decay_gap = 0.0;
};

/// For R above threshold_value(chi, mu): roots beta_-, beta_+ of f, and the
/// midpoint of (max(0, beta_-), beta_+) moved off chi when it lands there.
/// Throws ThresholdNotMet when R is not above the threshold.
BetaWindow beta_window(double chi, double mu, double r);

/// Lower exponent bound max{2, h/lambda, (1-h)/(1-alpha-lambda), (3c-2)/(2-2c alpha)}.
double p_lower_bound(double c, double h, double alpha, double lambda);

/// Upper exponent bound
/// [c(1-lambda)(2-h) - (1-lambda+c lambda)] / [1 - c alpha - lambda + alpha c lambda + c lambda^2].
double p_upper_bound(double c, double h, double alpha, double lambda);

/// Open interval (1/2 - (lambda^2 + lambda)/(1 - lambda), 1/2) for h.
struct Interval {
    double lo, hi;
};
Interval h_interval(double lambda);

/// Every exponent and coefficient of one plan, plus the eleven inequality checks.
struct LpPlan {
    double c = 0.0;
    double alpha = 0.0;
    double alpha_gap = 0.0;
    double lambda = 0.0;
    double h = 0.0;
    double d = 0.0;
    double p_lower = 0.0;
    double p_upper = 0.0;
    double p = 0.0;
    double l = 0.0;
    double r = 0.0;
    double m = 0.0;
    double epsilon = 0.0;
    double epsilon_max = 0.0;
    int shrinks = 0;
    std::map<std::string, bool> flags;

    bool all_flags() const;
};

/// Evaluates the eleven inequalities from scratch, each by its own arithmetic:
/// lambda_range, p_above_lower_bound, young_exponent_positive,
/// gradient_weight_positive, gradient_term_subcritical, young_conjugate_valid,
/// ratio_weight_positive, ratio_term_subcritical, remainder_term_subcritical,
/// epsilon_exponent_gap, epsilon_ratio_gap.
std::map<std::string, bool> plan_inequalities(double c, double h, double alpha, double lambda,
                                              double p, double epsilon);

/// Largest epsilon keeping both epsilon conditions true (may be <= 0).
double max_admissible_epsilon(double c, double h, double alpha, double lambda, double p);

/// Builds a plan with alpha = 1/c - alpha_gap, lambda = 1 - c alpha and h at
/// fraction h_frac of its interval. While the exponent window is closed the gap
/// is halved, at most 60 times. Throws ParameterError on bad input and
/// InfeasiblePlan (carrying the last p_lower, p_upper) when the window never opens.
LpPlan lp_parameter_plan(double c, double h_frac, double alpha_gap);

/// Searches a grid of (c, h_frac) for a plan with every flag true and p > max(dim, 3).
/// Throws InfeasiblePlan if none exists in the search.
LpPlan select_lp_exponent(int dim);

/// Slacks of the three exponent conditions that must all be positive for a
/// plan to exist:
///   gradient  = (2 - 2c alpha) p - (3c - 2)              [gradient_term_subcritical]
///   ratio     = 2(lambda^2 p + lambda + (1-lambda) h) - (1-lambda)  [ratio_term_subcritical]
///   remainder = c(1-lambda)(2-h) - (1-lambda+c lambda)
///               - p [(1 - c alpha)(1 - lambda) + c lambda^2]  [remainder_term_subcritical]
/// They satisfy c * ratio + 2 * remainder + (1 - lambda) * gradient = 0 identically,
/// so with c > 0 and lambda < 1 the three can never be positive together.
struct PlanSlacks {
    double gradient = 0.0;
    double ratio = 0.0;
    double remainder = 0.0;
    double combination(double c, double lambda) const {
        return c * ratio + 2.0 * remainder + (1.0 - lambda) * gradient;
    }
};
PlanSlacks plan_slacks(double c, double h, double alpha, double lambda, double p);

}  // namespace chemo
