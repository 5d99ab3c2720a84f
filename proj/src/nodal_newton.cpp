#include "nodal_newton.hpp"

#include "plap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace plap::detail {

std::vector<double> effective_eps_levels(double p, const std::vector<double>& levels) {
    if (p == 2.0 || levels.empty()) return {0.0};
    return levels;
}

namespace {

PLapParams params_at(const NodalProblem& prob, double eps) {
    return {prob.p, eps, prob.a, prob.q};
}

void residual(const NodalProblem& prob, std::span<const double> u, double eps,
              std::vector<double>& r) {
    kernel::residual_logistic(u, prob.b, prob.h, params_at(prob, eps), r);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (prob.fixed[i]) r[i] = 0.0;
}

double sq_norm(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

double sup(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

bool bordered_solve(TridiagonalOperator J, std::size_t k, std::span<const double> c,
                    std::span<const double> rhs, std::vector<double>& dx, double& dtheta) {
    const std::size_t m = J.size();
    double s = J.diag[k];
    if (s == 0.0 || !std::isfinite(s)) s = 1.0;
    J.diag[k] = s;
    if (k > 0) J.sup[k - 1] = 0.0;
    if (k + 1 < m) J.sub[k + 1] = 0.0;
    std::vector<double> col(c.begin(), c.end());
    col[k] -= s;
    std::vector<double> z, w;
    try {
        z = J.solve(rhs);
        w = J.solve(col);
    } catch (const DegenerateJacobian&) {
        return false;
    }
    const double denom = 1.0 + w[k];
    if (denom == 0.0 || !std::isfinite(denom)) return false;
    const double coef = z[k] / denom;
    dx.resize(m);
    for (std::size_t r = 0; r < m; ++r) dx[r] = z[r] - w[r] * coef;
    dtheta = dx[k];
    dx[k] = 0.0;
    return true;
}

double free_residual(const NodalProblem& prob, std::span<const double> u, double eps) {
    std::vector<double> r(u.size());
    residual(prob, u, eps, r);
    return sup(r);
}

NewtonReport solve_nodal(const NodalProblem& prob, std::vector<double>& u,
                         const NewtonOptions& opts) {
    const std::size_t n = u.size();
    NewtonReport rep;
    std::vector<double> r(n), trial(n), r_trial(n);
    const auto levels = effective_eps_levels(prob.p, opts.eps_levels);

    for (std::size_t level = 0; level < levels.size(); ++level) {
        const double eps = levels[level];
        const bool last = level + 1 == levels.size();
        const double target = last ? opts.tol : std::max(opts.tol, opts.stage_tol);
        rep.eps_final = eps;
        residual(prob, u, eps, r);
        double merit = sq_norm(r);
        rep.residual = sup(r);
        rep.reason.clear();

        for (int it = 0; it < opts.max_iter && rep.residual > target; ++it) {
            ++rep.iterations;
            TridiagonalOperator J = kernel::linearize(u, prob.b, prob.h, params_at(prob, eps));
            std::vector<double> rhs(n - 2);
            for (std::size_t k = 0; k + 2 < n; ++k) {
                const std::size_t i = k + 1;
                if (prob.fixed[i]) {
                    J.sub[k] = 0.0;
                    J.sup[k] = 0.0;
                    J.diag[k] = 1.0;
                    rhs[k] = 0.0;
                } else {
                    if (prob.fixed[i - 1]) J.sub[k] = 0.0;
                    if (prob.fixed[i + 1]) J.sup[k] = 0.0;
                    rhs[k] = -r[i];
                }
            }
            std::vector<double> du;
            try {
                du = J.solve(rhs);
            } catch (const DegenerateJacobian&) {
                rep.reason = "singular Jacobian";
                break;
            }

            // Armijo backtracking on ||R||_2^2, keeping the iterate nonnegative.
            double t = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i];
                for (std::size_t k = 0; k + 2 < n; ++k)
                    if (!prob.fixed[k + 1]) trial[k + 1] = std::max(0.0, u[k + 1] + t * du[k]);
                residual(prob, trial, eps, r_trial);
                const double m_trial = sq_norm(r_trial);
                if (std::isfinite(m_trial) && m_trial <= (1.0 - 1e-4 * t) * merit) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                rep.reason = "line search stalled";
                break;
            }
            u.swap(trial);
            r.swap(r_trial);
            merit = sq_norm(r);
            rep.residual = sup(r);

            bool all_zero = true;
            for (std::size_t i = 0; i < n && all_zero; ++i)
                if (!prob.fixed[i] && u[i] > 0.0) all_zero = false;
            if (all_zero) {
                rep.zero_iterate = true;
                rep.reason = "iterate collapsed to zero";
                return rep;
            }
        }
        if (last) rep.converged = rep.residual <= target;
        if (last && !rep.converged && rep.reason.empty()) rep.reason = "iteration limit";
    }
    return rep;
}

}  // namespace plap::detail
