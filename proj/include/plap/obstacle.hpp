#pragma once

#include "plap/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plap {

enum class ObstacleExistence { Exists, NoSolution };

std::string to_string(ObstacleExistence e);

/// Solution of -Δ_p w = a χ_{w<1} w^{p-1}, w = 0 on the boundary, sup w = 1.
struct ObstacleResult {
    Field w;
    std::vector<bool> coincidence;  // nodes held at w = 1
    double residual_pde = 0.0;      // sup |-Δ_p w - a w^{p-1}| off the coincidence set
    double residual_comp = 0.0;     // violation of 0 <= -Δ_p w <= a on the set, or of w <= 1 off it
    ObstacleExistence existence = ObstacleExistence::Exists;
    int iterations = 0;  // active-set sweeps
    double lambda1 = 0.0;
};

struct ObstacleOptions {
    std::optional<std::vector<bool>> initial_active;
    int max_iter = 20000;
};

/// Primal active-set iteration: growth-only sweeps first, then additions and
/// releases together. A free run that admits no positive solution
/// (a >= its λ₁) gets its middle node pinned to 1.
/// Throws NoConvergence or CycleDetected.
ObstacleResult solve_free_boundary(GridPtr grid, double p, double a, double tol = 1e-8,
                                   const ObstacleOptions& opts = {});

/// Solution of the variational inequality over K = {v <= 1 off Ω₀}.
struct VIResult {
    Field u;
    std::vector<bool> active;  // constraint u = 1 active (never inside Ω₀)
    double vi_defect = 0.0;
    double residual_pde = 0.0;
    int iterations = 0;
};

/// Requires λ₁ < a < λ₁(Ω₀); throws InfeasibleWindow otherwise.
VIResult solve_vi(GridPtr grid, double p, double a, const SubdomainMask& omega0,
                  double tol = 1e-8);

/// Same with an arbitrary set of unconstrained nodes; an all-false mask gives
/// the free-boundary problem.
VIResult solve_vi(GridPtr grid, double p, double a, const std::vector<bool>& unconstrained,
                  double tol = 1e-8);

/// w off Ω₀, and inside Ω₀ the solution of -Δ_p u = a u^{p-1} with u = 1 on the
/// nodes next to Ω₀. Throws PlateauTooSmall when w < 1 somewhere on Ω₀ or on
/// its neighbouring nodes, or when a >= λ₁(Ω₀).
Field compose_reference_vi(const ObstacleResult& w, const SubdomainMask& omega0, double p,
                           double a, double tol = 1e-8);

/// Largest value over probe directions d of max(0, -form(d)) / ||d||_∞ with
///   form(d) = Σ_edges h F(Du) Dd - Σ_nodes h a u^{p-1} d.
/// Probes are nodal hats of several widths: decreases everywhere, increases
/// at unconstrained nodes and where u < 1.
double vi_probe_defect(const Field& u, const std::vector<bool>& unconstrained, double p,
                       double a);

struct MultistartReport {
    std::vector<ObstacleResult> runs;  // ordered by seed
    double max_pairwise_distance = 0.0;
    bool all_no_solution = false;
};

/// solve_free_boundary from k random initial coincidence sets drawn with
/// seeds seed, seed+1, ...
MultistartReport multistart_uniqueness(GridPtr grid, double p, double a, int k,
                                       double tol = 1e-8, std::uint64_t seed = 1);

}  // namespace plap
