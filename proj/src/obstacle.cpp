#include "plap/obstacle.hpp"

#include "nodal_newton.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace plap {

std::string to_string(ObstacleExistence e) {
    return e == ObstacleExistence::Exists ? "Exists" : "NoSolution";
}

namespace {

constexpr double kEnterLevel = 1.0 - 1e-10;

std::vector<NodeRange> runs_of(const std::vector<bool>& flag, bool value) {
    std::vector<NodeRange> out;
    const std::size_t n = flag.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (flag[i] != value) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 2 < n && flag[j + 1] == value) ++j;
        out.push_back({i, j});
        i = j + 1;
    }
    return out;
}

class RunEigenvalues {
public:
    RunEigenvalues(const GridPtr& grid, double p) : grid_(grid), p_(p) {}

    double operator()(std::size_t count) {
        auto it = memo_.find(count);
        if (it != memo_.end()) return it->second;
        const double lam = run_eigenvalue(*grid_, {1, count}, p_);
        memo_.emplace(count, lam);
        return lam;
    }

private:
    GridPtr grid_;
    double p_;
    std::map<std::size_t, double> memo_;
};

struct ActiveSetProblem {
    GridPtr grid;
    double p;
    double a;
    double tol;
    std::vector<bool> allowed;  // nodes that may join the coincidence set
    int max_iter;
};

struct ActiveSetOutcome {
    std::vector<double> w;
    std::vector<bool> C;
    int sweeps = 0;
};

double eps_final(double p) { return p == 2.0 ? 0.0 : 1e-8; }

std::vector<double> p_laplacian(const ActiveSetProblem& pr, const std::vector<double>& w) {
    std::vector<double> Lw(w.size());
    kernel::apply_p_laplacian(w, pr.grid->h(), pr.p, eps_final(pr.p), Lw);
    return Lw;
}

// Pins a node in every free run whose length admits no positive solution.
void pin_infeasible_runs(const ActiveSetProblem& pr, RunEigenvalues& run_lambda,
                         std::vector<bool>& C) {
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& run : runs_of(C, false)) {
            if (pr.a < run_lambda(run.count())) continue;
            const double mid = 0.5 * static_cast<double>(run.first + run.last);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = run.first; i <= run.last; ++i) {
                const double d = std::abs(static_cast<double>(i) - mid);
                if (pr.allowed[i] && d < best_d) {
                    best = i;
                    best_d = d;
                }
            }
            if (best == 0)
                throw InfeasibleWindow("a free run of " + std::to_string(run.count()) +
                                       " unconstrained nodes has lambda_1 <= a");
            C[best] = true;
            changed = true;
        }
    }
}

// Continuation in a from the piecewise-linear interpolant of the fixed values,
// used when Newton from the current iterate fails.
bool solve_by_homotopy(const ActiveSetProblem& pr, const std::vector<bool>& fixed,
                       std::vector<double>& w) {
    const std::size_t n = w.size();
    std::size_t left = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (!fixed[i]) continue;
        for (std::size_t j = left + 1; j < i; ++j)
            w[j] = w[left] + (w[i] - w[left]) * static_cast<double>(j - left) /
                                 static_cast<double>(i - left);
        left = i;
    }
    const std::vector<double> zero(n, 0.0);
    detail::NewtonOptions opts;
    opts.tol = pr.tol;
    double theta = 0.0;
    double step = 0.25;
    while (theta < 1.0) {
        if (step < 1e-4) return false;
        const double next = std::min(1.0, theta + step);
        std::vector<double> trial = w;
        const detail::NodalProblem prob{pr.grid->h(), pr.p, next * pr.a, pr.p, zero, fixed};
        const auto rep = detail::solve_nodal(prob, trial, opts);
        if (rep.converged) {
            theta = next;
            w.swap(trial);
            step = std::min(0.5, 2.0 * step);
        } else {
            step *= 0.5;
        }
    }
    return true;
}

void solve_free_nodes(const ActiveSetProblem& pr, const std::vector<bool>& C,
                      std::vector<double>& w) {
    const std::size_t n = w.size();
    std::vector<bool> fixed = C;
    fixed.front() = fixed.back() = true;
    w.front() = w.back() = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (C[i]) w[i] = 1.0;
    const std::vector<double> zero(n, 0.0);
    const detail::NodalProblem prob{pr.grid->h(), pr.p, pr.a, pr.p, zero, fixed};
    detail::NewtonOptions opts;
    opts.tol = pr.tol;
    std::vector<double> warm = w;
    const auto rep = detail::solve_nodal(prob, warm, opts);
    if (rep.converged) {
        w.swap(warm);
        return;
    }
    if (!solve_by_homotopy(pr, fixed, w))
        throw NoConvergence("free-run solve: " + rep.reason + ", residual " +
                            short_num(rep.residual));
}

ActiveSetOutcome active_set(const ActiveSetProblem& pr, std::vector<bool> C) {
    const std::size_t n = pr.grid->size();
    RunEigenvalues run_lambda(pr.grid, pr.p);
    C.resize(n, false);
    C.front() = C.back() = false;
    for (std::size_t i = 0; i < n; ++i) C[i] = C[i] && pr.allowed[i];

    ActiveSetOutcome out;
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.w[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));

    bool growth = true;
    std::set<std::vector<bool>> seen;
    for (int sweep = 0; sweep < pr.max_iter; ++sweep) {
        pin_infeasible_runs(pr, run_lambda, C);
        solve_free_nodes(pr, C, out.w);
        ++out.sweeps;

        std::vector<bool> next = C;
        bool added = false;
        for (std::size_t i = 1; i + 1 < n; ++i)
            if (!C[i] && pr.allowed[i] && out.w[i] >= kEnterLevel) {
                next[i] = true;
                added = true;
            }
        if (growth) {
            if (added) {
                C.swap(next);
                continue;
            }
            growth = false;
        }
        const auto Lw = p_laplacian(pr, out.w);
        for (std::size_t i = 1; i + 1 < n; ++i)
            if (C[i] && pr.a - Lw[i] < -10.0 * pr.tol) next[i] = false;
        if (next == C) {
            out.C = std::move(C);
            return out;
        }
        if (!seen.insert(C).second)
            throw CycleDetected("active set revisited after " + std::to_string(out.sweeps) +
                                " sweeps");
        C.swap(next);
    }
    throw NoConvergence("active set did not settle in " + std::to_string(pr.max_iter) + " sweeps");
}

double pde_residual(const ActiveSetProblem& pr, const std::vector<double>& w,
                    const std::vector<bool>& C) {
    const auto Lw = p_laplacian(pr, w);
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < w.size(); ++i)
        if (!C[i]) r = std::max(r, std::abs(Lw[i] - pr.a * pow_guarded(w[i], pr.p - 1.0)));
    return r;
}

double comp_residual(const ActiveSetProblem& pr, const std::vector<double>& w,
                     const std::vector<bool>& C) {
    const auto Lw = p_laplacian(pr, w);
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        if (C[i])
            r = std::max({r, -Lw[i], Lw[i] - pr.a});
        else if (pr.allowed[i])
            r = std::max(r, w[i] - 1.0);
    }
    return r;
}

void check_args(double p, double a, double tol) {
    if (!(p > 1.0) || !std::isfinite(p)) throw BadExponent("need p > 1");
    if (!std::isfinite(a)) throw RangeError("a must be finite");
    if (!(tol > 0.0)) throw RangeError("tol must be positive");
}

}  // namespace

ObstacleResult solve_free_boundary(GridPtr grid, double p, double a, double tol,
                                   const ObstacleOptions& opts) {
    check_args(p, a, tol);
    const std::size_t n = grid->size();
    ObstacleResult res;
    const auto eig = principal_eigenpair(grid, p);
    res.lambda1 = eig.lambda;
    res.coincidence.assign(n, false);
    const double band = tol * std::max(1.0, std::abs(a));
    if (a < eig.lambda - band) {
        res.existence = ObstacleExistence::NoSolution;
        res.w = Field(grid);
        return res;
    }
    if (a <= eig.lambda + band) {
        res.w = eig.U;
        res.residual_pde = eig.residual;
        return res;
    }

    std::vector<bool> allowed(n, true);
    allowed.front() = allowed.back() = false;
    const ActiveSetProblem pr{grid, p, a, tol, allowed, opts.max_iter};
    auto out = active_set(pr, opts.initial_active.value_or(std::vector<bool>(n, false)));
    res.iterations = out.sweeps;
    res.residual_pde = pde_residual(pr, out.w, out.C);
    res.residual_comp = comp_residual(pr, out.w, out.C);
    res.coincidence = std::move(out.C);
    res.w = Field(grid, std::move(out.w));
    return res;
}

VIResult solve_vi(GridPtr grid, double p, double a, const std::vector<bool>& unconstrained,
                  double tol) {
    check_args(p, a, tol);
    const std::size_t n = grid->size();
    if (unconstrained.size() != n) throw GridMismatch("mask does not match the grid");
    const double lambda1 = principal_eigenpair(grid, p).lambda;
    double lambda0 = std::numeric_limits<double>::infinity();
    for (const auto& run : runs_of(unconstrained, true))
        lambda0 = std::min(lambda0, run_eigenvalue(*grid, run, p));
    if (!(a > lambda1 && a < lambda0))
        throw InfeasibleWindow("need lambda_1 = " + short_num(lambda1) + " < a = " +
                               short_num(a) + " < " + short_num(lambda0));

    std::vector<bool> allowed(n);
    for (std::size_t i = 0; i < n; ++i) allowed[i] = !unconstrained[i];
    allowed.front() = allowed.back() = false;
    const ActiveSetProblem pr{grid, p, a, tol, allowed, ObstacleOptions{}.max_iter};
    auto out = active_set(pr, std::vector<bool>(n, false));

    VIResult res;
    res.iterations = out.sweeps;
    res.residual_pde = pde_residual(pr, out.w, out.C);
    res.active = std::move(out.C);
    res.u = Field(grid, std::move(out.w));
    res.vi_defect = vi_probe_defect(res.u, unconstrained, p, a);
    return res;
}

VIResult solve_vi(GridPtr grid, double p, double a, const SubdomainMask& omega0, double tol) {
    if (!omega0.grid || !omega0.grid->same_as(*grid)) throw GridMismatch("mask grid differs");
    return solve_vi(grid, p, a, omega0.inside, tol);
}

Field compose_reference_vi(const ObstacleResult& w, const SubdomainMask& omega0, double p,
                           double a, double tol) {
    check_args(p, a, tol);
    const GridPtr grid = w.w.grid;
    if (!omega0.grid || !omega0.grid->same_as(*grid)) throw GridMismatch("mask grid differs");
    if (w.existence != ObstacleExistence::Exists) throw PlateauTooSmall("no plateau at all");
    const NodeRange r = omega0.range();
    for (std::size_t i = r.first - 1; i <= r.last + 1; ++i)
        if (w.w[i] < kEnterLevel)
            throw PlateauTooSmall("w = " + short_num(w.w[i]) + " < 1 at x = " +
                                  short_num(grid->node(i)));
    if (a >= run_eigenvalue(*grid, r, p)) throw PlateauTooSmall("a >= lambda_1 of the subdomain");

    const std::size_t n = grid->size();
    std::vector<double> u = w.w.values;
    std::vector<bool> fixed(n, true);
    for (std::size_t i = r.first; i <= r.last; ++i) {
        fixed[i] = false;
        u[i] = 1.0;
    }
    u[r.first - 1] = u[r.last + 1] = 1.0;
    const std::vector<double> zero(n, 0.0);
    const detail::NodalProblem prob{grid->h(), p, a, p, zero, fixed};
    detail::NewtonOptions opts;
    opts.tol = tol;
    const auto rep = detail::solve_nodal(prob, u, opts);
    if (!rep.converged) throw NoConvergence("subdomain solve: " + rep.reason);
    return Field(grid, std::move(u));
}

double vi_probe_defect(const Field& u, const std::vector<bool>& unconstrained, double p,
                       double a) {
    const std::size_t n = u.size();
    if (unconstrained.size() != n) throw GridMismatch("mask does not match the field");
    const double h = u.grid->h();
    std::vector<double> F(n - 1);
    for (std::size_t e = 0; e + 1 < n; ++e) F[e] = p_flux((u[e + 1] - u[e]) / h, p, 0.0);
    // form(d) = Σ_i g_i d_i for d vanishing on the boundary.
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
        g[i] = F[i - 1] - F[i] - h * a * pow_guarded(std::max(u[i], 0.0), p - 1.0);

    double defect = 0.0;
    for (std::size_t r : {1, 2, 4, 8, 16, 32}) {
        const std::size_t stride = std::max<std::size_t>(1, r / 2);
        for (std::size_t c = r; c + r < n; c += stride) {
            double form = 0.0;
            bool can_increase = true;
            for (std::size_t j = c - r + 1; j < c + r; ++j) {
                const double d = 1.0 - std::abs(static_cast<double>(j) - static_cast<double>(c)) /
                                           static_cast<double>(r);
                form += g[j] * d;
                if (!unconstrained[j] && !(u[j] < 1.0)) can_increase = false;
            }
            defect = std::max(defect, form);
            if (can_increase) defect = std::max(defect, -form);
        }
    }
    return defect;
}

MultistartReport multistart_uniqueness(GridPtr grid, double p, double a, int k, double tol,
                                       std::uint64_t seed) {
    if (k < 2) throw RangeError("multistart needs k >= 2");
    const std::size_t n = grid->size();
    MultistartReport rep;
    rep.runs.resize(static_cast<std::size_t>(k));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < k; ++j) {
        try {
            std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
            std::uniform_int_distribution<std::size_t> centre(1, n - 2);
            std::uniform_int_distribution<std::size_t> radius(0, n / 4);
            std::bernoulli_distribution sprinkle(0.01);
            std::vector<bool> C(n, false);
            const std::size_t c = centre(rng);
            const std::size_t r = radius(rng);
            for (std::size_t i = c > r ? c - r : 1; i <= std::min(n - 2, c + r); ++i) C[i] = true;
            for (std::size_t i = 1; i + 1 < n; ++i)
                if (sprinkle(rng)) C[i] = true;
            ObstacleOptions opts;
            opts.initial_active = std::move(C);
            rep.runs[static_cast<std::size_t>(j)] = solve_free_boundary(grid, p, a, tol, opts);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    rep.all_no_solution = true;
    for (const auto& r : rep.runs)
        if (r.existence != ObstacleExistence::NoSolution) rep.all_no_solution = false;
    for (std::size_t i = 0; i < rep.runs.size(); ++i)
        for (std::size_t j = i + 1; j < rep.runs.size(); ++j)
            for (std::size_t m = 0; m < n; ++m)
                rep.max_pairwise_distance = std::max(
                    rep.max_pairwise_distance, std::abs(rep.runs[i].w[m] - rep.runs[j].w[m]));
    return rep;
}

}  // namespace plap
