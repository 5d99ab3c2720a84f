#pragma once

// Damped Newton for nodal problems of the form
//   -Δ_p u - a u^{p-1} + b u^q = 0   at free nodes,
//   u = given                          at fixed nodes,
// shared by the logistic, free-boundary and variational-inequality solvers.

#include "plap/kernels.hpp"

#include <span>
#include <string>
#include <vector>

namespace plap::detail {

struct NodalProblem {
    double h = 0.0;
    double p = 2.0;
    double a = 0.0;
    double q = 2.0;
    std::span<const double> b;  // one entry per node
    std::vector<bool> fixed;    // Dirichlet nodes; both ends must be fixed
};

struct NewtonOptions {
    double tol = 1e-8;              // sup-norm residual at the final eps
    double stage_tol = 1e-6;        // looser target on intermediate eps levels
    int max_iter = 200;             // per eps level
    std::vector<double> eps_levels = {1e-2, 1e-4, 1e-6, 1e-8};
};

struct NewtonReport {
    bool converged = false;
    bool zero_iterate = false;
    int iterations = 0;
    double residual = 0.0;
    double eps_final = 0.0;
    std::string reason;
};

/// Regularization levels actually used: p = 2 needs none.
std::vector<double> effective_eps_levels(double p, const std::vector<double>& levels);

/// Sup-norm of the residual over free nodes.
double free_residual(const NodalProblem& prob, std::span<const double> u, double eps);

/// Solves J dx + c dθ = rhs under the constraint dx[k] = 0 (indices over the
/// interior unknowns): column k of J is swapped for c via Sherman-Morrison.
/// Returns false when the bordered system is singular.
bool bordered_solve(TridiagonalOperator J, std::size_t k, std::span<const double> c,
                    std::span<const double> rhs, std::vector<double>& dx, double& dtheta);

/// Improves u in place. Negative trial values are clamped to 0.
NewtonReport solve_nodal(const NodalProblem& prob, std::vector<double>& u,
                         const NewtonOptions& opts);

}  // namespace plap::detail
