#include "chemo/elliptic.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "chemo/errors.hpp"
#include "chemo/format.hpp"

namespace chemo {
namespace {

double norm2(const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

double relative_residual(const Grid& g, double mu, const std::vector<double>& v,
                         const std::vector<double>& rhs) {
    const std::vector<double> av = apply_screened_laplacian(g, mu, v);
    double rr = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = av[k] - rhs[k];
        rr += d * d;
    }
    const double bn = norm2(rhs);
    return bn > 0.0 ? std::sqrt(rr) / bn : std::sqrt(rr);
}

// Thomas algorithm; the matrix is strictly diagonally dominant since mu > 0.
std::vector<double> solve_tridiagonal(const Grid& g, double mu, const std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    const double c = 1.0 / (g.spacing(0) * g.spacing(0));
    std::vector<double> upper(n), x(n);
    auto diag = [&](std::size_t i) { return mu + c * ((i > 0) + (i + 1 < n)); };

    double den = diag(0);
    upper[0] = -c / den;
    x[0] = rhs[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = diag(i) + c * upper[i - 1];
        upper[i] = (i + 1 < n) ? -c / den : 0.0;
        x[i] = (rhs[i] + c * x[i - 1]) / den;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper[i] * x[i + 1];
    return x;
}

struct CgResult {
    std::vector<double> x;
    int iterations;
    bool converged;
};

CgResult conjugate_gradient(const Grid& g, double mu, const std::vector<double>& rhs,
                            std::vector<double> x, double tol, int max_iter) {
    const std::size_t n = rhs.size();
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    const double cx = 1.0 / (g.spacing(0) * g.spacing(0));
    const double cy = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;

    std::vector<double> inv_diag(n);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double d = mu + cx * ((i > 0) + (i < nx - 1)) + cy * ((j > 0) + (j < ny - 1));
            inv_diag[static_cast<std::size_t>(i + nx * j)] = 1.0 / d;
        }
    }

    const double target = tol * norm2(rhs);
    std::vector<double> r = apply_screened_laplacian(g, mu, x);
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - r[k];
    if (norm2(r) <= target) return {std::move(x), 0, true};

    std::vector<double> z(n), p(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    p = z;
    double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);

    for (int it = 1; it <= max_iter; ++it) {
        const std::vector<double> ap = apply_screened_laplacian(g, mu, p);
        const double alpha = rz / std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if (norm2(r) <= target) return {std::move(x), it, true};
        for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
        const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    return {std::move(x), max_iter, false};
}

}  // namespace

void EllipticConfig::validate() const {
    if (!(rel_tolerance > 0.0 && rel_tolerance <= 1e-4)) {
        throw ParameterError("elliptic: rel_tolerance must lie in (0, 1e-4]");
    }
    if (max_iterations < 0) throw ParameterError("elliptic: max_iterations must be >= 1");
}

ChemicalSolution solve_screened_poisson(const ScalarField& u, double mu, double nu,
                                        const EllipticConfig& cfg,
                                        const ScalarField* warm_start) {
    cfg.validate();
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("elliptic: mu must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("elliptic: nu must be positive");
    if (!u.all_finite()) throw IntegrationError("elliptic: source field holds non-finite values");

    const Grid& g = u.grid;
    std::vector<double> rhs(u.values);
    for (double& x : rhs) x *= nu;

    EllipticMethod method = cfg.method;
    if (method == EllipticMethod::Auto) {
        method = g.dim() == 1 ? EllipticMethod::Direct1D : EllipticMethod::ConjugateGradient;
    }

    std::vector<double> v;
    int iterations = 0;
    double rr = 0.0;
    if (method == EllipticMethod::Direct1D) {
        if (g.dim() != 1) throw ParameterError("elliptic: direct solver is 1D only");
        v = solve_tridiagonal(g, mu, rhs);
        rr = relative_residual(g, mu, v, rhs);
        // Iterative refinement recovers the digits lost to the h^-2 scaling.
        for (int pass = 0; pass < 3 && !(rr <= cfg.rel_tolerance); ++pass) {
            std::vector<double> r = apply_screened_laplacian(g, mu, v);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] = rhs[k] - r[k];
            const std::vector<double> dv = solve_tridiagonal(g, mu, r);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += dv[k];
            rr = relative_residual(g, mu, v, rhs);
        }
    } else {
        if (warm_start != nullptr && warm_start->grid == g) {
            v = warm_start->values;
        } else {
            v.resize(rhs.size());
            for (std::size_t k = 0; k < v.size(); ++k) v[k] = rhs[k] / mu;
        }
        const int max_iter = cfg.max_iterations > 0
                                 ? cfg.max_iterations
                                 : static_cast<int>(10 * g.cell_count());
        // The recurrence residual can drift from the true one; restart from the
        // current iterate until the true residual meets the tolerance.
        for (;;) {
            CgResult res = conjugate_gradient(g, mu, rhs, std::move(v), cfg.rel_tolerance,
                                              max_iter - iterations);
            v = std::move(res.x);
            iterations += res.iterations;
            // The constant vector is an eigenvector of the operator (eigenvalue mu),
            // so the mean component of the error is removed exactly.
            const double sum_b = std::accumulate(rhs.begin(), rhs.end(), 0.0);
            const double sum_v = std::accumulate(v.begin(), v.end(), 0.0);
            const double shift = (sum_b - mu * sum_v) / (mu * static_cast<double>(v.size()));
            for (double& x : v) x += shift;
            rr = relative_residual(g, mu, v, rhs);
            if (!res.converged) {
                throw SolverFailure("elliptic: CG did not converge in " + std::to_string(max_iter) +
                                        " iterations (relative residual " + format_double(rr) + ")",
                                    rr, iterations);
            }
            if (rr <= cfg.rel_tolerance || res.iterations == 0 || iterations >= max_iter) break;
        }
    }

    if (!(rr <= cfg.rel_tolerance)) {
        throw SolverFailure("elliptic: relative residual " + format_double(rr) +
                                " exceeds tolerance " + format_double(cfg.rel_tolerance),
                            rr, iterations);
    }
    return {ScalarField(g, std::move(v)), rr, iterations};
}

ChemicalSolution solve_chemical(const ScalarField& u, double mu, double nu,
                                const EllipticConfig& cfg, const ScalarField* warm_start) {
    if (!(mu > 0.0)) throw ParameterError("elliptic: mu must be positive");
    if (!u.all_finite()) throw IntegrationError("elliptic: density holds non-finite values");
    if (u.min() < 0.0) throw DomainError("elliptic: density must be nonnegative");
    if (!(integrate(u) > 0.0)) throw DomainError("elliptic: density must have positive mass");
    return solve_screened_poisson(u, mu, nu, cfg, warm_start);
}

}  // namespace chemo
