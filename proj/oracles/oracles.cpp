#include "oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

double pi_p(double p) { return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p)); }

double p_eigenvalue_closed_form(double p, double length) {
    return (p - 1.0) * std::pow(pi_p(p) / length, p);
}

namespace {

// State (u, F) with F = |u'|^{p-2}u'.
struct State {
    double u;
    double F;
};

double slope_of_flux(double F, double p) {
    const double m = std::pow(std::abs(F), 1.0 / (p - 1.0));
    return F < 0.0 ? -m : m;
}

double signed_pow(double u, double k) {
    const double m = std::pow(std::abs(u), k);
    return u < 0.0 ? -m : m;
}

template <class Rhs>
State rk4(State s, double dx, int steps, Rhs&& rhs) {
    for (int k = 0; k < steps; ++k) {
        const State k1 = rhs(s);
        const State k2 = rhs({s.u + 0.5 * dx * k1.u, s.F + 0.5 * dx * k1.F});
        const State k3 = rhs({s.u + 0.5 * dx * k2.u, s.F + 0.5 * dx * k2.F});
        const State k4 = rhs({s.u + dx * k3.u, s.F + dx * k3.F});
        s.u += dx / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        s.F += dx / 6.0 * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F);
    }
    return s;
}

}  // namespace

double shooting_eigenvalue(double p, double length, int steps) {
    const double half = 0.5 * length;
    auto flux_at_mid = [&](double lambda) {
        auto rhs = [&](State s) {
            return State{slope_of_flux(s.F, p), -lambda * signed_pow(s.u, p - 1.0)};
        };
        return rk4({0.0, 1.0}, half / steps, steps, rhs).F;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (flux_at_mid(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("shooting_eigenvalue: no bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (flux_at_mid(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

LogisticShot shooting_logistic(double p, double a, double b, double q, double length, int steps) {
    const double half = 0.5 * length;
    // Positive F at the midpoint means the trajectory is still rising there.
    auto shoot = [&](double F0) {
        auto rhs = [&](State s) {
            const double u = std::max(s.u, 0.0);
            return State{slope_of_flux(s.F, p), -a * std::pow(u, p - 1.0) + b * std::pow(u, q)};
        };
        return rk4({0.0, F0}, half / steps, steps, rhs);
    };
    double lo = 1e-12;
    if (shoot(lo).F > 0.0) throw std::runtime_error("shooting_logistic: a is below the first eigenvalue");
    double hi = 1.0;
    while (shoot(hi).F < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("shooting_logistic: no bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid).F < 0.0 ? lo : hi) = mid;
    }
    const double F0 = 0.5 * (lo + hi);
    return {slope_of_flux(F0, p), shoot(F0).u};
}

double gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels) {
    static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                                0.2223810344533745, 0.1012285362903763};
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double c = lo + (k + 0.5) * width;
        const double r = 0.5 * width;
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += w[j] * (f(c - r * x[j]) + f(c + r * x[j]));
        total += r * s;
    }
    return total;
}

double log_weighted_constant(const std::function<double(double)>& U, double p, double lo,
                             double hi, int panels) {
    auto num = [&](double x) {
        const double u = U(x);
        return u > 0.0 ? std::pow(u, p) * std::log(u) : 0.0;
    };
    auto den = [&](double x) { return std::pow(std::abs(U(x)), p); };
    return std::exp(gauss_legendre(num, lo, hi, panels) / gauss_legendre(den, lo, hi, panels));
}

}  // namespace oracle
