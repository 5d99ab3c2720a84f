#pragma once

#include "plap/mesh.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace plap {

/// Principal Dirichlet eigenpair of  -Δ_p U + φ U^{p-1} = λ U^{p-1}.
struct EigenResult {
    double lambda = 0.0;
    Field U;  // positive inside, 0 on the boundary, max U = 1
    int iterations = 0;
    double residual = 0.0;  // sup-norm of the nodal eigen-equation residual
};

struct EigenOptions {
    int max_iter = 400;
    /// Starting iterate; defaults to sin(π (x - x_left) / (x_right - x_left)).
    std::optional<Field> initial;
    /// Run the projected-gradient stage even when the inverse iteration converges.
    bool force_gradient_stage = false;
};

/// Regularization at which eigen residuals are certified (p != 2).
inline constexpr double kEigenEps = 1e-8;

/// Nonlinear inverse-power iteration followed by a bordered
/// Newton polish with eps continuation; projected gradient descent on the
/// Rayleigh quotient is the fallback when Newton stalls.
/// Throws NoConvergence when the residual stays above tol.
EigenResult principal_eigenpair(GridPtr grid, const Field& phi, double p, double tol = 1e-8,
                                const EigenOptions& opts = {});

/// φ ≡ 0.
EigenResult principal_eigenpair(GridPtr grid, double p, double tol = 1e-8);

/// Discrete Rayleigh quotient (Σ h|Du|^p + Σ h φ|u|^p) / Σ h|u|^p.
double rayleigh_quotient(const Field& u, const Field& phi, double p);

/// λ₁ of the run of interior nodes `range`, with Dirichlet zeros on the two
/// neighbouring nodes and the same spacing as `grid`. Works for any run length.
double run_eigenvalue(const Grid1D& grid, NodeRange range, double p, double tol = 1e-8);

/// min over the zero runs of b of the run eigenvalue; +inf when b has no zeros.
double vanishing_set_eigenvalue(const Field& b, double p, double tol = 1e-8);

struct AlphaResult {
    double alpha = 0.0;
    EigenResult eigen;  // eigenpair for φ = alpha * b
    std::pair<double, double> bracket;
};

/// Solves a = λ₁(α b) for α >= 0. Throws AlphaOutOfRange when a < λ₁ or,
/// for b vanishing on an interior run, a >= λ₁ of that run.
AlphaResult solve_alpha(GridPtr grid, const Field& b, double a, double p, double tol = 1e-8);

/// (α, λ₁(α b)) for each α, in input order; evaluated concurrently.
std::vector<std::pair<double, double>> lambda_curve(GridPtr grid, const Field& b,
                                                    std::span<const double> alphas,
                                                    double p = 2.0, double tol = 1e-8);

}  // namespace plap
