#pragma once

/// @file elliptic.hpp
/// @brief Screened Poisson solve (mu I - Delta_h) v = nu u with Neumann closure.

#include "chemo/mesh.hpp"

namespace chemo {

enum class EllipticMethod {
    Auto,  ///< Direct1D on 1D grids, ConjugateGradient otherwise.
    Direct1D,
    ConjugateGradient,
};

struct EllipticConfig {
    double rel_tolerance = 1e-10;
    /// 0 selects 10 * cell count.
    int max_iterations = 0;
    EllipticMethod method = EllipticMethod::Auto;

    /// Throws ParameterError unless rel_tolerance is in (0, 1e-4] and max_iterations >= 0.
    void validate() const;
};

struct ChemicalSolution {
    ScalarField v;
    /// ||(mu I - Delta_h) v - nu u||_2 / ||nu u||_2 of the returned v.
    double relative_residual = 0.0;
    int iterations = 0;
};

/// Solves the chemical equation for a nonnegative density `u` with positive mass.
/// The returned v is strictly positive. `warm_start`, when given, seeds the
/// iterative method; it is ignored by the direct solver.
ChemicalSolution solve_chemical(const ScalarField& u, double mu, double nu,
                                const EllipticConfig& cfg,
                                const ScalarField* warm_start = nullptr);

/// Same operator without the sign/mass preconditions on `u` (manufactured
/// solutions need sign-changing sources).
ChemicalSolution solve_screened_poisson(const ScalarField& u, double mu, double nu,
                                        const EllipticConfig& cfg,
                                        const ScalarField* warm_start = nullptr);

}  // namespace chemo
