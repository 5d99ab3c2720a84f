#include "plap/kernels.hpp"

#include "plap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace plap {

void validate(const PLapParams& params, bool logistic) {
    if (!(params.p > 1.0) || !std::isfinite(params.p)) throw BadExponent("need 1 < p < inf");
    if (!(params.eps >= 0.0)) throw BadExponent("need eps >= 0");
    if (logistic && !(params.q > params.p - 1.0)) throw BadExponent("need q > p - 1");
}

double pow_guarded(double u, double k) {
    if (k == 0.0) return 1.0;
    if (!(u > kPowerFloor)) return 0.0;
    const double lg = k * std::log(u);
    if (lg >= std::log(kPowerCap)) return kPowerCap;
    return std::exp(lg);
}

double p_flux(double s, double p, double eps) {
    if (s == 0.0) return 0.0;
    if (p == 2.0) return s;
    return s * std::pow(s * s + eps * eps, 0.5 * (p - 2.0));
}

double p_flux_slope(double s, double p, double eps) {
    if (p == 2.0) return 1.0;
    const double r2 = s * s + eps * eps;
    if (r2 == 0.0) return p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(r2, 0.5 * (p - 4.0)) * ((p - 1.0) * s * s + eps * eps);
}

namespace kernel {

namespace {

// Fixed-size blocks keep reductions bitwise reproducible for any thread count.
constexpr std::size_t kBlock = 512;

template <class F>
double block_sum(std::size_t n, Exec exec, F&& term) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
    const bool par = exec == Exec::parallel && n >= kParallelMinNodes;
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        double acc = 0.0;
        const std::size_t end = std::min(n, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) acc += term(i);
        partial[blk] = acc;
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

bool use_omp(Exec exec, std::size_t n) { return exec == Exec::parallel && n >= kParallelMinNodes; }

}  // namespace

void apply_p_laplacian(std::span<const double> u, double h, double p, double eps,
                       std::span<double> out, Exec exec) {
    const std::size_t n = u.size();
    const double inv_h = 1.0 / h;
    out[0] = 0.0;
    out[n - 1] = 0.0;
    const bool par = use_omp(exec, n);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 1; i < n - 1; ++i) {
        const double left = p_flux((u[i] - u[i - 1]) * inv_h, p, eps);
        const double right = p_flux((u[i + 1] - u[i]) * inv_h, p, eps);
        out[i] = -(right - left) * inv_h;
    }
}

void residual_logistic(std::span<const double> u, std::span<const double> b, double h,
                       const PLapParams& params, std::span<double> out, Exec exec) {
    apply_p_laplacian(u, h, params.p, params.eps, out, exec);
    const std::size_t n = u.size();
    const bool par = use_omp(exec, n);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t i = 1; i < n - 1; ++i) {
        const double ui = std::max(u[i], 0.0);
        out[i] += -params.a * pow_guarded(ui, params.p - 1.0) + b[i] * pow_guarded(ui, params.q);
    }
}

TridiagonalOperator linearize(std::span<const double> u, std::span<const double> b, double h,
                              const PLapParams& params, Exec exec) {
    const std::size_t n = u.size();
    const std::size_t m = n - 2;
    TridiagonalOperator J(m);
    const double inv_h = 1.0 / h;
    const double inv_h2 = inv_h * inv_h;
    const bool par = use_omp(exec, n);
#pragma omp parallel for schedule(static) if (par)
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        const double ui = std::max(u[i], 0.0);
        const double left = p_flux_slope((u[i] - u[i - 1]) * inv_h, params.p, params.eps) * inv_h2;
        const double right = p_flux_slope((u[i + 1] - u[i]) * inv_h, params.p, params.eps) * inv_h2;
        J.sub[r] = r > 0 ? -left : 0.0;
        J.sup[r] = r + 1 < m ? -right : 0.0;
        J.diag[r] = left + right - params.a * (params.p - 1.0) * pow_guarded(ui, params.p - 2.0) +
                    b[i] * params.q * pow_guarded(ui, params.q - 1.0);
    }
    return J;
}

double p_energy(std::span<const double> u, double h, double p, double eps, Exec exec) {
    const double inv_h = 1.0 / h;
    const double sum = block_sum(u.size() - 1, exec, [&](std::size_t e) {
        const double s = (u[e + 1] - u[e]) * inv_h;
        return std::pow(s * s + eps * eps, 0.5 * p);
    });
    return h * sum / p;
}

double sup_norm(std::span<const double> u, Exec exec) {
    double m = 0.0;
    const bool par = use_omp(exec, u.size());
#pragma omp parallel for schedule(static) reduction(max : m) if (par)
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
    return m;
}

double trapezoid(std::span<const double> f, double h, Exec exec) {
    const std::size_t n = f.size();
    const double inner = block_sum(n, exec, [&](std::size_t i) {
        return (i == 0 || i + 1 == n) ? 0.5 * f[i] : f[i];
    });
    return h * inner;
}

}  // namespace kernel

namespace {

void check_nonnegative(const Field& u) {
    for (double v : u.values)
        if (v < -1e-12) throw NegativeInput("u has an entry " + std::to_string(v) + " < -1e-12");
}

void check_degenerate(const Field& u, const PLapParams& params) {
    if (!(params.p < 2.0 && params.eps == 0.0)) return;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (u[i + 1] == u[i])
            throw DegenerateJacobian("p < 2 with eps = 0 and a vanishing slope at cell " +
                                     std::to_string(i));
}

Field apply_impl(const Field& u, const PLapParams& params, Exec exec) {
    validate(params, false);
    Field out(u.grid);
    kernel::apply_p_laplacian(u.span(), u.grid->h(), params.p, params.eps, out.span(), exec);
    return out;
}

Field residual_impl(const Field& u, const Field& b, const PLapParams& params, Exec exec) {
    validate(params, false);
    require_same_grid(u, b, "residual_logistic");
    check_nonnegative(u);
    Field out(u.grid);
    kernel::residual_logistic(u.span(), b.span(), u.grid->h(), params, out.span(), exec);
    return out;
}

TridiagonalOperator linearize_impl(const Field& u, const Field& b, const PLapParams& params,
                                   Exec exec) {
    validate(params, false);
    require_same_grid(u, b, "linearize");
    check_nonnegative(u);
    check_degenerate(u, params);
    return kernel::linearize(u.span(), b.span(), u.grid->h(), params, exec);
}

double norm_impl(const Field& u, double m, Exec exec) {
    if (std::isinf(m) && m > 0) return kernel::sup_norm(u.span(), exec);
    if (!(m >= 1.0)) throw BadExponent("norm exponent must be >= 1 or infinity");
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::pow(std::abs(u[i]), m);
    return std::pow(kernel::trapezoid(f, u.grid->h(), exec), 1.0 / m);
}

}  // namespace

Field apply_p_laplacian(const Field& u, const PLapParams& params) {
    return apply_impl(u, params, Exec::parallel);
}
Field residual_logistic(const Field& u, const Field& b, const PLapParams& params) {
    return residual_impl(u, b, params, Exec::parallel);
}
TridiagonalOperator linearize(const Field& u, const Field& b, const PLapParams& params) {
    return linearize_impl(u, b, params, Exec::parallel);
}
double p_energy(const Field& u, double p, double eps) {
    return kernel::p_energy(u.span(), u.grid->h(), p, eps, Exec::parallel);
}
double norm(const Field& u, double m) { return norm_impl(u, m, Exec::parallel); }

namespace reference {
Field apply_p_laplacian(const Field& u, const PLapParams& params) {
    return apply_impl(u, params, Exec::serial);
}
Field residual_logistic(const Field& u, const Field& b, const PLapParams& params) {
    return residual_impl(u, b, params, Exec::serial);
}
TridiagonalOperator linearize(const Field& u, const Field& b, const PLapParams& params) {
    return linearize_impl(u, b, params, Exec::serial);
}
double p_energy(const Field& u, double p, double eps) {
    return kernel::p_energy(u.span(), u.grid->h(), p, eps, Exec::serial);
}
double norm(const Field& u, double m) { return norm_impl(u, m, Exec::serial); }
}  // namespace reference

}  // namespace plap
