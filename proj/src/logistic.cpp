#include "plap/logistic.hpp"

#include "nodal_newton.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace plap {

std::string to_string(Existence e) {
    switch (e) {
        case Existence::Exists: return "Exists";
        case Existence::BelowLambda1: return "BelowLambda1";
        case Existence::AboveLambdaOmega0: return "AboveLambdaOmega0";
    }
    return "?";
}

ExistenceWindow existence_window(GridPtr grid, const Field& b, double p) {
    ExistenceWindow w;
    w.lambda1 = principal_eigenpair(grid, p).lambda;
    if (!zero_runs(b).empty()) w.lambda_omega0 = vanishing_set_eigenvalue(b, p);
    return w;
}

namespace {

const double kLogCap = std::log(kPowerCap);

void check_inputs(const GridPtr& grid, const Field& b, const PLapParams& params) {
    validate(params, true);
    if (!b.grid || !b.grid->same_as(*grid) || b.size() != grid->size())
        throw GridMismatch("b does not live on the solver grid");
    for (double v : b.values)
        if (v < 0.0) throw NegativeCoefficient("b must be nonnegative");
}

/// Moves the sup-norm of w into log_scale. Returns false for a zero field.
bool renormalize(std::vector<double>& w, double& log_scale) {
    double m = 0.0;
    for (double& v : w) {
        v = std::max(v, 0.0);
        m = std::max(m, v);
    }
    if (!(m > 0.0) || !std::isfinite(m)) return false;
    for (double& v : w) v /= m;
    log_scale += std::log(m);
    return true;
}

struct Attempt {
    bool ok = false;
    std::vector<double> w;
    double log_scale = 0.0;
    double residual = 0.0;
    double eps_final = 0.0;
    int iterations = 0;
    std::string reason;
};

double sup_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// With u = e^ℓ w the equation reads -Δ_p w - a w^{p-1} + e^{(q-p+1)ℓ} b w^q = 0,
// regularized on w. Newton runs on (w, ℓ) with w pinned to 1 at its maximum,
// so the trivial solution is out of reach.
Attempt attempt(const GridPtr& grid, const Field& b, const PLapParams& params,
                const ScaledGuess& guess, const LogisticOptions& opts) {
    const double delta = params.q - params.p + 1.0;
    const std::size_t n = grid->size();
    const std::size_t m = n - 2;
    const double h = grid->h();
    Attempt at;
    at.w = guess.profile.values;
    at.w.front() = at.w.back() = 0.0;
    at.log_scale = guess.log_scale;
    if (!renormalize(at.w, at.log_scale)) {
        at.reason = "zero initial guess";
        return at;
    }

    std::vector<double> sb(n), G(n), trial(n), G_trial(n), rhs(m), col(m), dw;
    auto residual = [&](const std::vector<double>& w, double log_scale, double eps,
                        std::vector<double>& out) {
        const double sigma = std::exp(std::clamp(delta * log_scale, -kLogCap, kLogCap));
        for (std::size_t i = 0; i < n; ++i) sb[i] = sigma * b[i];
        kernel::residual_logistic(w, sb, h, {params.p, eps, params.a, params.q}, out);
    };

    const auto levels = detail::effective_eps_levels(params.p, detail::NewtonOptions{}.eps_levels);
    const double stage_tol = std::max(opts.tol, detail::NewtonOptions{}.stage_tol);
    for (std::size_t level = 0; level < levels.size(); ++level) {
        const double eps = levels[level];
        const bool last = level + 1 == levels.size();
        const double target = last ? opts.tol : stage_tol;
        at.eps_final = eps;
        for (int it = 0;; ++it) {
            renormalize(at.w, at.log_scale);
            residual(at.w, at.log_scale, eps, G);
            at.residual = sup_abs(G);
            if (at.residual <= target) break;
            if (it == opts.max_iter) {
                at.reason = "iteration limit";
                break;
            }
            ++at.iterations;

            const std::size_t k = static_cast<std::size_t>(
                std::max_element(at.w.begin(), at.w.end()) - at.w.begin());
            const TridiagonalOperator J =
                kernel::linearize(at.w, sb, h, {params.p, eps, params.a, params.q});
            // d/dℓ of the reaction term.
            for (std::size_t r = 0; r < m; ++r) {
                rhs[r] = -G[r + 1];
                col[r] = delta * sb[r + 1] * pow_guarded(at.w[r + 1], params.q);
            }
            double dl = 0.0;
            if (!detail::bordered_solve(J, k - 1, col, rhs, dw, dl)) {
                at.reason = "singular bordered Jacobian";
                break;
            }

            const double merit = sq_norm(G);
            bool accepted = false;
            double t = 1.0;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                trial = at.w;
                for (std::size_t r = 0; r < m; ++r)
                    trial[r + 1] = std::max(0.0, at.w[r + 1] + t * dw[r]);
                residual(trial, at.log_scale + t * dl, eps, G_trial);
                const double mt = sq_norm(G_trial);
                if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * t) * merit) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                at.reason = "line search stalled";
                break;
            }
            at.w.swap(trial);
            at.log_scale += t * dl;
        }
        if (last) at.ok = at.residual <= opts.tol;
    }
    return at;
}

}  // namespace

ScaledGuess default_guess(GridPtr grid, const Field& b, const PLapParams& params) {
    const double delta = params.q - params.p + 1.0;
    try {
        auto ar = solve_alpha(grid, b, params.a, params.p);
        if (ar.alpha > 0.0) return {ar.eigen.U, std::log(ar.alpha) / delta};
    } catch (const Error&) {
    }
    return {principal_eigenpair(grid, params.p).U, std::log(0.5)};
}

Field default_init(GridPtr grid, const Field& b, const PLapParams& params) {
    auto g = default_guess(grid, b, params);
    const double M = std::exp(std::min(g.log_scale, kLogCap));
    Field u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::min(g.profile[i] * M, kPowerCap);
    return u;
}

LogisticResult solve_logistic(GridPtr grid, const Field& b, const PLapParams& params,
                              const LogisticOptions& opts) {
    check_inputs(grid, b, params);
    if (!(opts.tol > 0.0)) throw RangeError("tol must be positive");
    LogisticResult res;
    res.window = opts.window ? *opts.window : existence_window(grid, b, params.p);
    if (params.a <= res.window.lambda1) {
        res.existence = Existence::BelowLambda1;
        return res;
    }
    if (res.window.lambda_omega0 && params.a >= *res.window.lambda_omega0) {
        res.existence = Existence::AboveLambdaOmega0;
        return res;
    }

    // Warm start first, then the leading-order guess, then that guess halved.
    Attempt at;
    int iterations = 0;
    if (opts.guess) {
        at = attempt(grid, b, params, *opts.guess, opts);
        iterations += at.iterations;
    }
    if (!at.ok) {
        ScaledGuess g = default_guess(grid, b, params);
        for (int k = 0; k < 2 && !at.ok; ++k) {
            at = attempt(grid, b, params, g, opts);
            iterations += at.iterations;
            g.log_scale += std::log(0.5);
        }
    }
    if (!at.ok)
        throw NoConvergence("logistic solve (p=" + short_num(params.p) +
                            ", a=" + short_num(params.a) + ", q=" + short_num(params.q) +
                            "): " + at.reason + ", residual " + short_num(at.residual));

    res.existence = Existence::Exists;
    res.iterations = iterations;
    res.residual = at.residual;
    res.eps_final = at.eps_final;
    res.log_M = at.log_scale;
    res.scale_capped = at.log_scale > kLogCap;
    res.M = std::exp(std::min(at.log_scale, kLogCap));
    res.profile = Field(grid, std::move(at.w));
    res.u = Field(grid);
    for (std::size_t i = 0; i < res.u.size(); ++i)
        res.u[i] = std::min(res.profile[i] * res.M, kPowerCap);
    return res;
}

LogisticResult solve_logistic(GridPtr grid, const Field& b, const PLapParams& params,
                              const std::optional<Field>& init, double tol) {
    LogisticOptions opts;
    opts.tol = tol;
    if (init) {
        if (init->size() != grid->size()) throw GridMismatch("init does not match the grid");
        double m = 0.0;
        for (double v : init->values) m = std::max(m, v);
        if (m > 0.0) {
            Field prof(grid);
            for (std::size_t i = 0; i < prof.size(); ++i) prof[i] = std::max(0.0, (*init)[i] / m);
            opts.guess = ScaledGuess{std::move(prof), std::log(m)};
        }
    }
    return solve_logistic(grid, b, params, opts);
}

bool monotonicity_check(GridPtr grid, const Field& b, double p, double q, double a1, double a2,
                        double tol) {
    if (a1 > a2) throw PreconditionError("monotonicity_check needs a1 <= a2");
    if (a1 == a2) return true;
    const auto window = existence_window(grid, b, p);
    LogisticOptions opts;
    opts.tol = tol;
    opts.window = window;
    const auto r1 = solve_logistic(grid, b, {p, 0.0, a1, q}, opts);
    const auto r2 = solve_logistic(grid, b, {p, 0.0, a2, q}, opts);
    if (r1.existence != Existence::Exists || r2.existence != Existence::Exists)
        throw PreconditionError("monotonicity_check needs both a values in the existence window");
    for (std::size_t i = 0; i < r1.u.size(); ++i)
        if (r1.u[i] > r2.u[i] + 1e-8) return false;
    return true;
}

}  // namespace plap
