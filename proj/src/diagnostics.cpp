#include "chemo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "chemo/errors.hpp"
#include "chemo/format.hpp"

namespace chemo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw ParameterError("fields live on different grids");
}

void require_positive(const ScalarField& v, const char* who) {
    for (double x : v.values) {
        if (!(x > 0.0)) throw DomainError(std::string(who) + ": divisor field has a nonpositive cell");
    }
}

std::string exponent_label(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

bool grad_ratio_applies(double p, int dim) { return p > 1.0 && p < dim; }

}  // namespace

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    double sum = 0.0;
    for (double x : f.values) {
        if (x < 0.0) throw DomainError("lp_norm: negative value");
        if (!std::isfinite(x)) throw IntegrationError("lp_norm: non-finite value");
        sum += std::pow(x, p);
    }
    return std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

double weighted_integral(const ScalarField& u, const ScalarField& v, double q, double s) {
    require_same_grid(u, v);
    require_positive(v, "weighted_integral");
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] < 0.0) throw DomainError("weighted_integral: negative density");
        sum += std::pow(u[k], q) / std::pow(v[k], s);
    }
    return sum * u.grid.cell_volume();
}

double grad_weighted_integral(const ScalarField& v, double q, double s) {
    if (!(q >= 0.0)) throw DomainError("grad_weighted_integral: q must be >= 0");
    require_positive(v, "grad_weighted_integral");
    const ScalarField g2 = cell_gradient_sq(v);
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        sum += std::pow(g2[k], 0.5 * q) / std::pow(v[k], s);
    }
    return sum * v.grid.cell_volume();
}

double log_mass(const ScalarField& u, Strictness mode) {
    double sum = 0.0;
    for (double x : u.values) {
        if (!(x >= kDegenerateCell)) {
            if (mode == Strictness::Strict) throw DomainError("log_mass: degenerate cell");
            return -kInf;
        }
        sum += std::log(x);
    }
    return sum * u.grid.cell_volume();
}

double neg_power(const ScalarField& u, double p, Strictness mode) {
    double sum = 0.0;
    for (double x : u.values) {
        if (!(x >= kDegenerateCell)) {
            if (mode == Strictness::Strict) throw DomainError("neg_power: degenerate cell");
            return kInf;
        }
        sum += std::pow(x, -p);
    }
    return sum * u.grid.cell_volume();
}

double gradient_ratio(const ScalarField& u, const ScalarField& v, double p) {
    const int n = u.grid.dim();
    if (!grad_ratio_applies(p, n)) throw DomainError("gradient_ratio: need 1 < p < dim");
    const double q = n * p / (n - p);
    const double grad_norm = std::pow(grad_weighted_integral(v, q, 0.0), 1.0 / q);
    return grad_norm / lp_norm(u, p);
}

double rayleigh_face(const ScalarField& v) {
    require_positive(v, "rayleigh_face");
    const Grid& g = v.grid;
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    double sum = 0.0;
    const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const auto k = static_cast<std::size_t>(i + nx * j);
            const double d = v[k] - v[k - 1];
            sum += cx * d * d / (v[k] * v[k - 1]);
        }
    }
    if (g.dim() == 2) {
        const double cy = 1.0 / (g.spacing(1) * g.spacing(1));
        const auto snx = static_cast<std::size_t>(nx);
        for (std::size_t k = snx; k < v.size(); ++k) {
            const double d = v[k] - v[k - snx];
            sum += cy * d * d / (v[k] * v[k - snx]);
        }
    }
    return sum * g.cell_volume();
}

DiagnosticsRecord compute_record(double t, long step, double dt, const ScalarField& u,
                                 const ScalarField& v, double elliptic_residual,
                                 const MonitorSpec& spec) {
    DiagnosticsRecord r;
    r.t = t;
    r.step = step;
    r.dt = dt;
    r.mass = integrate(u);
    r.min_u = u.min();
    r.max_u = u.max();
    r.min_v = v.min();
    r.max_v = v.max();
    r.rayleigh = grad_weighted_integral(v, 2.0, 2.0);
    r.log_mass = log_mass(u);
    r.v_ratio = r.min_v / r.mass;
    r.elliptic_residual = elliptic_residual;
    for (double p : spec.lp_exponents) r.lp_norms[p] = lp_norm(u, p);
    for (double p : spec.neg_power_exponents) r.neg_power[p] = neg_power(u, p);
    for (double p : spec.grad_ratio_exponents) {
        if (grad_ratio_applies(p, u.grid.dim())) r.grad_ratio[p] = gradient_ratio(u, v, p);
    }
    return r;
}

std::vector<std::string> csv_header(const MonitorSpec& spec, int dim) {
    std::vector<std::string> h{"t",     "mass",     "min_u",   "max_u", "min_v",
                               "max_v", "rayleigh", "log_mass", "v_ratio", "step",
                               "dt",    "elliptic_residual"};
    for (double p : spec.lp_exponents) h.push_back("lp_" + exponent_label(p));
    for (double p : spec.neg_power_exponents) h.push_back("negp_" + exponent_label(p));
    for (double p : spec.grad_ratio_exponents) {
        if (grad_ratio_applies(p, dim)) h.push_back("grad_ratio_" + exponent_label(p));
    }
    return h;
}

std::string csv_row(const DiagnosticsRecord& r, const MonitorSpec& spec, int dim) {
    std::ostringstream os;
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.min_u)
       << ',' << format_double(r.max_u) << ',' << format_double(r.min_v) << ','
       << format_double(r.max_v) << ',' << format_double(r.rayleigh) << ','
       << format_double(r.log_mass) << ',' << format_double(r.v_ratio) << ',' << r.step << ','
       << format_double(r.dt) << ',' << format_double(r.elliptic_residual);
    auto lookup = [](const std::map<double, double>& m, double p) {
        auto it = m.find(p);
        return it == m.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    };
    for (double p : spec.lp_exponents) os << ',' << format_double(lookup(r.lp_norms, p));
    for (double p : spec.neg_power_exponents) os << ',' << format_double(lookup(r.neg_power, p));
    for (double p : spec.grad_ratio_exponents) {
        if (grad_ratio_applies(p, dim)) os << ',' << format_double(lookup(r.grad_ratio, p));
    }
    return os.str();
}

double mass_ceiling(double initial_mass, double a_sup, double b_inf, double measure) {
    if (!(b_inf > 0.0)) return kInf;
    return std::max(initial_mass, a_sup / b_inf * measure);
}

BoundVerdict check_mass_bound(const DiagnosticsRecord& record, double m_star) {
    BoundVerdict v;
    v.value = record.mass;
    v.bound = m_star;
    v.pass = record.mass <= m_star * (1.0 + 1e-8);
    v.margin = std::isfinite(m_star) ? (m_star - record.mass) / m_star : kInf;
    return v;
}

BoundVerdict check_mass_bound(const std::vector<DiagnosticsRecord>& series, double m_star) {
    BoundVerdict worst;
    worst.pass = true;
    worst.margin = kInf;
    worst.bound = m_star;
    for (const auto& r : series) {
        const BoundVerdict v = check_mass_bound(r, m_star);
        worst.pass = worst.pass && v.pass;
        if (v.margin < worst.margin) {
            worst.margin = v.margin;
            worst.value = v.value;
        }
    }
    return worst;
}

BoundVerdict check_rayleigh_bound(const std::vector<DiagnosticsRecord>& series, double mu,
                                  double measure, double tol) {
    BoundVerdict worst;
    worst.pass = true;
    worst.bound = mu * measure;
    worst.margin = kInf;
    for (const auto& r : series) {
        const double margin = (worst.bound - r.rayleigh) / worst.bound;
        if (!(r.rayleigh <= worst.bound * (1.0 + tol))) worst.pass = false;
        if (margin < worst.margin || std::isnan(margin)) {
            worst.margin = margin;
            worst.value = r.rayleigh;
        }
    }
    return worst;
}

PersistenceVerdict check_persistence(const std::vector<DiagnosticsRecord>& series,
                                     double mass_floor, double v_floor) {
    PersistenceVerdict out;
    out.mass_floor = mass_floor;
    out.v_floor = v_floor;
    if (series.empty()) return out;
    out.min_mass = kInf;
    out.min_v = kInf;
    for (const auto& r : series) {
        out.min_mass = std::min(out.min_mass, r.mass);
        out.min_v = std::min(out.min_v, r.min_v);
    }
    out.pass = mass_floor > 0.0 && v_floor > 0.0 && out.min_mass >= mass_floor &&
               out.min_v >= v_floor;
    return out;
}

PersistenceVerdict check_persistence_trend(const std::vector<DiagnosticsRecord>& series) {
    if (series.size() < 2) return check_persistence({}, 0.0, 0.0);
    const std::size_t half = series.size() / 2;
    double first_mass = kInf, first_v = kInf;
    for (std::size_t i = 0; i < half; ++i) {
        first_mass = std::min(first_mass, series[i].mass);
        first_v = std::min(first_v, series[i].min_v);
    }
    const std::vector<DiagnosticsRecord> tail(series.begin() + static_cast<long>(half),
                                              series.end());
    return check_persistence(tail, 0.5 * first_mass, 0.5 * first_v);
}

double log_mass_decay_rate(const std::vector<DiagnosticsRecord>& series) {
    double worst = -kInf;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double dt = series[i].t - series[i - 1].t;
        if (!(dt > 0.0)) continue;
        if (!std::isfinite(series[i].log_mass) || !std::isfinite(series[i - 1].log_mass)) {
            return kInf;
        }
        worst = std::max(worst, -(series[i].log_mass - series[i - 1].log_mass) / dt);
    }
    return worst;
}

HolderCheck reverse_holder_check(const ScalarField& f, const ScalarField& g, double p) {
    require_same_grid(f, g);
    if (!(p > 1.0)) throw DomainError("reverse_holder_check: p must exceed 1");
    double fg = 0.0, f_root = 0.0, g_neg = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] < 0.0) throw DomainError("reverse_holder_check: f must be nonnegative");
        if (!(g[k] > 0.0)) throw DomainError("reverse_holder_check: g must be positive");
        fg += f[k] * g[k];
        f_root += std::pow(f[k], 1.0 / p);
        g_neg += std::pow(g[k], -1.0 / (p - 1.0));
    }
    const double w = f.grid.cell_volume();
    HolderCheck out;
    out.lhs = fg * w;
    out.rhs = std::pow(f_root * w, p) * std::pow(g_neg * w, -(p - 1.0));
    out.pass = out.lhs >= out.rhs * (1.0 - 1e-12);
    return out;
}

}  // namespace chemo
