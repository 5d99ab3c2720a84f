#pragma once

// Reference values computed without the finite-difference machinery:
// closed forms, ODE shooting and composite Gauss-Legendre quadrature.

#include <functional>

namespace oracle {

/// π_p = 2π / (p sin(π/p)).
double pi_p(double p);

/// First Dirichlet eigenvalue of -(|u'|^{p-2}u')' = λ|u|^{p-2}u on an interval
/// of the given length: (p-1) (π_p / length)^p.
double p_eigenvalue_closed_form(double p, double length);

/// Same eigenvalue from shooting. Integrates u' = |F|^{1/(p-1)} sign F,
/// F' = -λ|u|^{p-2}u from u(0) = 0, F(0) = 1 with RK4 and bisects λ until F
/// vanishes at the midpoint.
double shooting_eigenvalue(double p, double length, int steps = 20000);

struct LogisticShot {
    double slope = 0.0;  // u'(0)
    double M = 0.0;      // u at the midpoint, the maximum by symmetry
};

/// Positive solution of -(|u'|^{p-2}u')' = a u^{p-1} - b u^q on (0, length)
/// with constant b > 0, by bisection on the initial flux until the first
/// critical point sits at the midpoint.
LogisticShot shooting_logistic(double p, double a, double b, double q, double length,
                               int steps = 20000);

/// Composite 8-point Gauss-Legendre rule on `panels` equal panels.
double gauss_legendre(const std::function<double(double)>& f, double lo, double hi,
                      int panels = 4096);

/// exp(∫ U^p ln U / ∫ U^p) for a profile U given as a function on [lo, hi].
double log_weighted_constant(const std::function<double(double)>& U, double p, double lo,
                             double hi, int panels = 4096);

}  // namespace oracle
