#include "plap/eigen.hpp"

#include "plap/errors.hpp"
#include "plap/kernels.hpp"
#include "nodal_newton.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

namespace plap {

namespace {

struct Eigenpair {
    double lambda = 0.0;
    std::vector<double> u;  // all nodes
    int iterations = 0;
    double residual = 0.0;
};

/// Node-level problem: n nodes (two boundary), spacing h, potential phi.
struct EigenProblem {
    std::size_t n;
    double h;
    double p;
    std::span<const double> phi;
};

std::vector<double> eps_levels(double p) {
    if (p == 2.0) return {0.0};
    return {1e-2, 1e-4, 1e-6, kEigenEps};
}

double rayleigh(const EigenProblem& pr, std::span<const double> u) {
    double num = 0.0, den = 0.0;
    for (std::size_t e = 0; e + 1 < pr.n; ++e) num += std::pow(std::abs(u[e + 1] - u[e]) / pr.h, pr.p);
    for (std::size_t i = 1; i + 1 < pr.n; ++i) {
        const double up = std::pow(std::abs(u[i]), pr.p);
        num += pr.phi[i] * up;
        den += up;
    }
    return num / den;
}

void normalize_sup(std::vector<double>& u) {
    double m = 0.0;
    for (double& v : u) {
        v = std::max(v, 0.0);
        m = std::max(m, v);
    }
    if (!(m > 0.0)) throw NoConvergence("eigen iterate collapsed to zero");
    for (double& v : u) v /= m;
}

std::vector<double> eigen_residual(const EigenProblem& pr, std::span<const double> u,
                                   double lambda, double eps) {
    std::vector<double> r(pr.n);
    kernel::residual_logistic(u, pr.phi, pr.h, {pr.p, eps, lambda, pr.p - 1.0}, r);
    return r;
}

double sup_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

/// One nonlinear inverse-power step: minimize the convex energy of
///   -Δ_p v + (φ + shift) v^{p-1} = u^{p-1}
/// by damped Newton from a scaled copy of u, then renormalize.
void inverse_power_step(const EigenProblem& pr, std::vector<double>& u, double eps,
                        double phi_shift) {
    const std::size_t n = pr.n;
    const std::size_t m = n - 2;
    std::vector<double> c(n), f(n), G(n), trial(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = pr.phi[i] + phi_shift;
        f[i] = pow_guarded(std::max(u[i], 0.0), pr.p - 1.0);
    }
    const PLapParams par{pr.p, eps, 0.0, pr.p - 1.0};
    auto energy = [&](std::span<const double> v) {
        double e = kernel::p_energy(v, pr.h, pr.p, eps);
        for (std::size_t i = 1; i + 1 < n; ++i)
            e += pr.h * (c[i] / pr.p * std::pow(std::max(v[i], 0.0), pr.p) - f[i] * v[i]);
        return e;
    };
    auto gradient = [&](std::span<const double> v) {
        kernel::residual_logistic(v, c, pr.h, par, G);
        for (std::size_t i = 1; i + 1 < n; ++i) G[i] -= f[i];
    };

    std::vector<double> v = u;
    const double R = std::max(rayleigh(pr, u) + phi_shift, 1e-300);
    for (double& x : v) x *= std::pow(R, -1.0 / (pr.p - 1.0));
    const double fmax = sup_abs(f);
    double E = energy(v);
    for (int it = 0; it < 60; ++it) {
        gradient(v);
        if (sup_abs(G) <= 1e-8 * fmax) break;
        const TridiagonalOperator J = kernel::linearize(v, c, pr.h, par);
        std::vector<double> rhs(m);
        for (std::size_t r = 0; r < m; ++r) rhs[r] = -G[r + 1];
        const auto d = J.solve(rhs);
        double slope = 0.0;
        for (std::size_t r = 0; r < m; ++r) slope += pr.h * G[r + 1] * d[r];
        if (!(slope < 0.0)) break;
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            trial = v;
            for (std::size_t r = 0; r < m; ++r) trial[r + 1] = v[r + 1] + t * d[r];
            const double Et = energy(trial);
            if (std::isfinite(Et) && Et <= E + 1e-4 * t * slope) {
                accepted = true;
                E = Et;
                break;
            }
        }
        if (!accepted) break;
        v.swap(trial);
    }
    u.swap(v);
    normalize_sup(u);
}

/// Bordered Newton on (u, λ) with u_k = 1 at the current maximum node k.
/// Returns false when the line search stalls.
bool newton_polish(const EigenProblem& pr, std::vector<double>& u, double& lambda, double eps,
                   double target, int max_iter, int& iterations) {
    const std::size_t n = pr.n;
    const std::size_t m = n - 2;
    for (int it = 0; it < max_iter; ++it) {
        normalize_sup(u);
        auto G = eigen_residual(pr, u, lambda, eps);
        const double res = sup_abs(G);
        if (res <= target) return true;
        ++iterations;

        const std::size_t k = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
        const std::size_t rk = k - 1;
        const PLapParams par{pr.p, eps, lambda, pr.p - 1.0};
        const TridiagonalOperator J = kernel::linearize(u, pr.phi, pr.h, par);
        std::vector<double> rhs(m), col(m), y;
        for (std::size_t r = 0; r < m; ++r) {
            rhs[r] = -G[r + 1];
            col[r] = -pow_guarded(u[r + 1], pr.p - 1.0);
        }
        double dlambda = 0.0;
        if (!detail::bordered_solve(J, rk, col, rhs, y, dlambda)) return false;

        double merit = 0.0;
        for (double g : G) merit += g * g;
        std::vector<double> trial(n);
        bool accepted = false;
        double t = 1.0;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            trial = u;
            for (std::size_t r = 0; r < m; ++r) trial[r + 1] = std::max(0.0, u[r + 1] + t * y[r]);
            const double lt = lambda + t * dlambda;
            const auto Gt = eigen_residual(pr, trial, lt, eps);
            double mt = 0.0;
            for (double g : Gt) mt += g * g;
            if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * t) * merit) {
                accepted = true;
                lambda = lt;
                break;
            }
        }
        if (!accepted) return false;
        u.swap(trial);
    }
    normalize_sup(u);
    return sup_abs(eigen_residual(pr, u, lambda, eps)) <= target;
}

/// Projected steepest descent on the Rayleigh quotient.
void gradient_stage(const EigenProblem& pr, std::vector<double>& u, double eps, int steps,
                    int& iterations) {
    const std::size_t n = pr.n;
    std::vector<double> Lu(n), trial(n);
    double R = rayleigh(pr, u);
    for (int it = 0; it < steps; ++it) {
        ++iterations;
        kernel::apply_p_laplacian(u, pr.h, pr.p, eps, Lu);
        double den = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) den += pr.h * std::pow(u[i], pr.p);
        std::vector<double> g(n, 0.0);
        double gmax = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            g[i] = pr.p * pr.h * (Lu[i] + (pr.phi[i] - R) * pow_guarded(u[i], pr.p - 1.0)) / den;
            gmax = std::max(gmax, std::abs(g[i]));
        }
        if (gmax == 0.0) return;
        double t = 0.05 / gmax;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(0.0, u[i] - t * g[i]);
            trial.front() = trial.back() = 0.0;
            const double Rt = rayleigh(pr, trial);
            if (Rt < R) {
                u = trial;
                normalize_sup(u);
                R = rayleigh(pr, u);
                moved = true;
                break;
            }
        }
        if (!moved) return;
    }
}

Eigenpair solve_core(const EigenProblem& pr, std::vector<double> u, double tol,
                     const EigenOptions& opts) {
    if (pr.n < 3) throw InvalidDomain("eigenproblem needs at least one interior node");
    Eigenpair out;
    if (pr.n == 3) {
        out.u = {0.0, 1.0, 0.0};
        out.lambda = 2.0 / std::pow(pr.h, pr.p) + pr.phi[1];
        out.residual = sup_abs(eigen_residual(pr, out.u, out.lambda, pr.p == 2.0 ? 0.0 : kEigenEps));
        return out;
    }
    u.front() = u.back() = 0.0;
    normalize_sup(u);

    double phi_min = 0.0;
    for (std::size_t i = 1; i + 1 < pr.n; ++i) phi_min = std::min(phi_min, pr.phi[i]);
    const double phi_shift = -phi_min;
    const auto levels = eps_levels(pr.p);

    // Global stage: nonlinear inverse iteration at the coarsest regularization.
    double lambda = rayleigh(pr, u);
    for (int it = 0; it < opts.max_iter; ++it) {
        ++out.iterations;
        std::vector<double> prev = u;
        inverse_power_step(pr, u, levels.front(), phi_shift);
        const double next = rayleigh(pr, u);
        double du = 0.0;
        for (std::size_t i = 0; i < pr.n; ++i) du = std::max(du, std::abs(u[i] - prev[i]));
        const double dl = std::abs(next - lambda);
        lambda = next;
        if (du < 1e-5 && dl < 1e-8 * std::max(1.0, std::abs(lambda))) break;
    }
    if (opts.force_gradient_stage) {
        gradient_stage(pr, u, levels.front(), 50, out.iterations);
        lambda = rayleigh(pr, u);
    }

    const int newton_max = 60;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const bool last = l + 1 == levels.size();
        const double target = last ? tol : std::max(tol, 1e-6 * std::max(1.0, std::abs(lambda)));
        std::vector<double> u_save = u;
        const double lambda_save = lambda;
        if (!newton_polish(pr, u, lambda, levels[l], target, newton_max, out.iterations)) {
            // Fallback: descend the Rayleigh quotient, then retry Newton; keep the best iterate.
            std::vector<double> u_first = u;
            const double lambda_first = lambda;
            u = u_save;
            gradient_stage(pr, u, levels[l], 200, out.iterations);
            lambda = rayleigh(pr, u);
            if (!newton_polish(pr, u, lambda, levels[l], target, newton_max, out.iterations)) {
                auto res = [&](std::vector<double>& v, double lam) {
                    normalize_sup(v);
                    const double r = sup_abs(eigen_residual(pr, v, lam, levels[l]));
                    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
                };
                if (res(u_first, lambda_first) < res(u, lambda)) {
                    u.swap(u_first);
                    lambda = lambda_first;
                }
                if (res(u_save, lambda_save) < res(u, lambda)) {
                    u = u_save;
                    lambda = lambda_save;
                }
            }
        }
    }
    normalize_sup(u);
    out.u = std::move(u);
    out.lambda = lambda;
    out.residual = sup_abs(eigen_residual(pr, out.u, lambda, levels.back()));
    if (!(out.residual <= tol) || !std::isfinite(lambda))
        throw NoConvergence("principal eigenpair: residual " + short_num(out.residual) +
                            " above tol " + short_num(tol) + " after " +
                            std::to_string(out.iterations) + " iterations");
    return out;
}

std::vector<double> sine_bump(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    return u;
}

}  // namespace

EigenResult principal_eigenpair(GridPtr grid, const Field& phi, double p, double tol,
                                const EigenOptions& opts) {
    if (!(p > 1.0)) throw BadExponent("need p > 1");
    if (!(tol > 0.0)) throw RangeError("tol must be positive");
    if (phi.size() != grid->size()) throw GridMismatch("phi does not match the grid");
    std::vector<double> init;
    if (opts.initial) {
        if (opts.initial->size() != grid->size()) throw GridMismatch("initial iterate size");
        init = opts.initial->values;
    } else {
        init = sine_bump(grid->size());
    }
    const EigenProblem pr{grid->size(), grid->h(), p, phi.span()};
    auto core = solve_core(pr, std::move(init), tol, opts);
    return {core.lambda, Field(grid, std::move(core.u)), core.iterations, core.residual};
}

EigenResult principal_eigenpair(GridPtr grid, double p, double tol) {
    return principal_eigenpair(grid, Field(grid), p, tol);
}

double rayleigh_quotient(const Field& u, const Field& phi, double p) {
    require_same_grid(u, phi, "rayleigh_quotient");
    return rayleigh({u.size(), u.grid->h(), p, phi.span()}, u.span());
}

double run_eigenvalue(const Grid1D& grid, NodeRange range, double p, double tol) {
    if (range.first == 0 || range.last + 1 >= grid.size() || range.first > range.last)
        throw InvalidSubdomain("run must consist of interior nodes");
    const std::size_t n = range.count() + 2;
    const std::vector<double> phi(n, 0.0);
    const EigenProblem pr{n, grid.h(), p, phi};
    // Short runs have eigenvalues near (2/h)^p; the residual bound scales with them.
    const double length = static_cast<double>(n - 1) * grid.h();
    const double pi_p = 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
    const double magnitude = (p - 1.0) * std::pow(pi_p / length, p);
    return solve_core(pr, sine_bump(n), tol * std::max(1.0, magnitude), {}).lambda;
}

double vanishing_set_eigenvalue(const Field& b, double p, double tol) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& run : zero_runs(b)) best = std::min(best, run_eigenvalue(*b.grid, run, p, tol));
    return best;
}

AlphaResult solve_alpha(GridPtr grid, const Field& b, double a, double p, double tol) {
    for (double v : b.values)
        if (v < 0.0) throw NegativeCoefficient("b must be nonnegative");
    const double scale = std::max(1.0, std::abs(a));
    const double eig_tol = std::min(1e-8, 0.1 * tol * scale);

    auto lam = [&](double alpha, const std::optional<Field>& warm) {
        Field phi(grid);
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = alpha * b[i];
        EigenOptions o;
        o.initial = warm;
        return principal_eigenpair(grid, phi, p, eig_tol * std::max(1.0, alpha), o);
    };

    EigenResult e0 = lam(0.0, std::nullopt);
    if (std::abs(a - e0.lambda) <= tol * scale) return {0.0, e0, {0.0, 0.0}};
    if (a < e0.lambda)
        throw AlphaOutOfRange("a = " + short_num(a) + " <= lambda_1 = " + short_num(e0.lambda));
    const double limit = vanishing_set_eigenvalue(b, p, eig_tol);
    if (a >= limit)
        throw AlphaOutOfRange("a = " + short_num(a) + " >= lambda_1 of the zero set of b = " +
                              short_num(limit));

    double lo = 0.0, hi = 1.0;
    EigenResult e_lo = e0;
    EigenResult e_hi = lam(hi, e0.U);
    while (e_hi.lambda <= a) {
        lo = hi;
        e_lo = e_hi;
        hi *= 2.0;
        if (hi > 1e8) throw AlphaOutOfRange("lambda_1(alpha b) stays below a up to alpha = 1e8");
        e_hi = lam(hi, e_lo.U);
    }

    // Safeguarded Newton inside the bracket; dλ/dα = Σ b U^p / Σ U^p.
    auto slope = [&](const EigenResult& e) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 1; i + 1 < e.U.size(); ++i) {
            const double up = std::pow(e.U[i], p);
            num += b[i] * up;
            den += up;
        }
        return num / den;
    };
    double alpha = lo;
    EigenResult cur = e_lo;
    for (int it = 0; it < 200; ++it) {
        const double d = slope(cur);
        double next = d > 0.0 ? alpha + (a - cur.lambda) / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        cur = lam(next, cur.U);
        alpha = next;
        if (cur.lambda < a) lo = alpha; else hi = alpha;
        if (std::abs(cur.lambda - a) <= tol * scale) return {alpha, cur, {lo, hi}};
        if (hi - lo <= 1e-15 * hi) break;
    }
    throw NoConvergence("solve_alpha: bracket collapsed without meeting tolerance");
}

std::vector<std::pair<double, double>> lambda_curve(GridPtr grid, const Field& b,
                                                    std::span<const double> alphas, double p,
                                                    double tol) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] < 0.0) throw RangeError("alphas must be nonnegative");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) throw RangeError("alphas must be increasing");
    }
    std::vector<std::pair<double, double>> out(alphas.size());
    std::exception_ptr failure;
    const long count = static_cast<long>(alphas.size());
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < count; ++j) {
        try {
            Field phi(grid);
            for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = alphas[j] * b[i];
            const double t = tol * std::max(1.0, alphas[j]);
            out[j] = {alphas[j], principal_eigenpair(grid, phi, p, t).lambda};
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace plap
