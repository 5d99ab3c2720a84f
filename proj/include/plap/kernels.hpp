#pragma once

#include "plap/mesh.hpp"
#include "plap/tridiag.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace plap {

/// Exponents and regularization of the discrete operator
///   R(u) = -Δ_p u - a u^{p-1} + b u^q,
/// with the flux regularized as s (s^2 + eps^2)^{(p-2)/2}.
struct PLapParams {
    double p = 2.0;
    double eps = 0.0;
    double a = 0.0;
    double q = 2.0;
};

/// Throws BadExponent unless p > 1 and eps >= 0; with `logistic` also q > p-1.
void validate(const PLapParams& params, bool logistic);

/// Values below this are treated as zero when raised to a power.
inline constexpr double kPowerFloor = 1e-300;
/// Powers are capped here instead of overflowing.
inline constexpr double kPowerCap = 1e300;

/// u^k evaluated as exp(k ln u) for u > 1e-300 (0 below, 1 when k == 0),
/// capped at 1e300.
double pow_guarded(double u, double k);

/// Regularized flux s (s^2 + eps^2)^{(p-2)/2}; |s|^{p-2} s at eps = 0.
double p_flux(double s, double p, double eps);

/// d p_flux / ds = (s^2 + eps^2)^{(p-4)/2} ((p-1) s^2 + eps^2). Infinite for
/// p < 2, eps = 0, s = 0.
double p_flux_slope(double s, double p, double eps);

enum class Exec { serial, parallel };

/// Nodal loops run under OpenMP only above this many nodes.
inline constexpr std::size_t kParallelMinNodes = 2048;

/// Span-level kernels shared by the solvers. All spans cover every grid node
/// (boundary included); outputs are 0 at the two boundary nodes.
namespace kernel {

void apply_p_laplacian(std::span<const double> u, double h, double p, double eps,
                       std::span<double> out, Exec exec = Exec::parallel);

/// out = -Δ_p u - a u^{p-1} + b u^q at interior nodes. Negative entries of u
/// are treated as 0.
void residual_logistic(std::span<const double> u, std::span<const double> b, double h,
                       const PLapParams& params, std::span<double> out,
                       Exec exec = Exec::parallel);

/// Exact Jacobian of residual_logistic over the interior unknowns.
TridiagonalOperator linearize(std::span<const double> u, std::span<const double> b, double h,
                              const PLapParams& params, Exec exec = Exec::parallel);

/// (1/p) Σ_edges h (s^2 + eps^2)^{p/2}; its gradient is h * apply_p_laplacian.
double p_energy(std::span<const double> u, double h, double p, double eps,
                Exec exec = Exec::parallel);

double sup_norm(std::span<const double> u, Exec exec = Exec::parallel);

/// Trapezoidal integral of f over a uniform grid with spacing h.
double trapezoid(std::span<const double> f, double h, Exec exec = Exec::parallel);

}  // namespace kernel

Field apply_p_laplacian(const Field& u, const PLapParams& params);

/// Throws NegativeInput when some u_i < -1e-12; smaller negatives count as 0.
Field residual_logistic(const Field& u, const Field& b, const PLapParams& params);

/// Throws DegenerateJacobian for p < 2, eps = 0 and a vanishing interior slope.
TridiagonalOperator linearize(const Field& u, const Field& b, const PLapParams& params);

double p_energy(const Field& u, double p, double eps);

/// Discrete L^m norm; m = infinity gives the sup norm. Throws BadExponent for m < 1.
double norm(const Field& u, double m = std::numeric_limits<double>::infinity());

/// Serial reference kernels, kept for cross-checking the OpenMP paths.
namespace reference {
Field apply_p_laplacian(const Field& u, const PLapParams& params);
Field residual_logistic(const Field& u, const Field& b, const PLapParams& params);
TridiagonalOperator linearize(const Field& u, const Field& b, const PLapParams& params);
double p_energy(const Field& u, double p, double eps);
double norm(const Field& u, double m = std::numeric_limits<double>::infinity());
}  // namespace reference

}  // namespace plap
