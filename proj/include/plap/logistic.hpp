#pragma once

#include "plap/kernels.hpp"
#include "plap/mesh.hpp"

#include <optional>
#include <string>

namespace plap {

enum class Existence { Exists, BelowLambda1, AboveLambdaOmega0 };

std::string to_string(Existence e);

/// λ₁ of the whole interval and, when b has interior zeros, the smallest
/// eigenvalue among its zero runs.
struct ExistenceWindow {
    double lambda1 = 0.0;
    std::optional<double> lambda_omega0;
};

ExistenceWindow existence_window(GridPtr grid, const Field& b, double p);

/// Solution written as u = exp(log_scale) * profile. Lets the solver work
/// with sup-norms far outside the double range.
struct ScaledGuess {
    Field profile;
    double log_scale = 0.0;
};

struct LogisticResult {
    Field u;        // M * profile, entries capped at 1e300
    Field profile;  // u / M, sup-norm 1
    double M = 0.0;
    double log_M = 0.0;
    int iterations = 0;
    double residual = 0.0;  // sup-norm residual of the equation for the profile
    double eps_final = 0.0;
    Existence existence = Existence::Exists;
    ExistenceWindow window;
    bool scale_capped = false;
};

struct LogisticOptions {
    double tol = 1e-8;
    std::optional<ScaledGuess> guess;
    /// Reused instead of recomputing the eigenvalues when present.
    std::optional<ExistenceWindow> window;
    int max_iter = 200;
};

/// Positive solution of -Δ_p u = a u^{p-1} - b u^q by damped Newton with eps
/// continuation. The existence window is checked before any Newton step;
/// outside it the result carries the verdict and an empty u.
/// Throws NoConvergence when a solution should exist but is not found.
LogisticResult solve_logistic(GridPtr grid, const Field& b, const PLapParams& params,
                              const LogisticOptions& opts = {});

LogisticResult solve_logistic(GridPtr grid, const Field& b, const PLapParams& params,
                              const std::optional<Field>& init, double tol);

/// α^{1/(q-p+1)} U_α in scaled form; 0.5 times the eigenfunction of λ₁ when
/// α cannot be computed.
ScaledGuess default_guess(GridPtr grid, const Field& b, const PLapParams& params);

/// default_guess materialized, entries capped at 1e300.
Field default_init(GridPtr grid, const Field& b, const PLapParams& params);

/// u_{a1} <= u_{a2} + 1e-8 nodewise. Throws PreconditionError when a1 > a2.
bool monotonicity_check(GridPtr grid, const Field& b, double p, double q, double a1, double a2,
                        double tol = 1e-8);

}  // namespace plap
