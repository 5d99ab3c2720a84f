#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/kernels.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace plap;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

GridPtr unit(int n = 1024) { return build_grid(0.0, 1.0, n); }

void check_eigen_invariants(const EigenResult& e, const Field& phi, double p, double tol) {
    const auto& U = e.U;
    CHECK(U[0] == 0.0);
    CHECK(U[U.size() - 1] == 0.0);
    for (std::size_t i = 1; i + 1 < U.size(); ++i) CHECK(U[i] > 0.0);
    CHECK(std::abs(norm(U, kInf) - 1.0) < 1e-12);
    CHECK(e.residual <= tol);
    // residual recomputed independently
    const double eps = p == 2.0 ? 0.0 : kEigenEps;
    const auto L = apply_p_laplacian(U, {p, eps, 0.0, 2.0});
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < U.size(); ++i)
        r = std::max(r, std::abs(L[i] + (phi[i] - e.lambda) * std::pow(U[i], p - 1.0)));
    CHECK(r <= 10.0 * tol);
}

}  // namespace

TEST_CASE("principal eigenpair for p = 2 matches pi^2 and sin") {
    const auto g = unit();
    const Field phi(g, 0.0);
    const auto e = principal_eigenpair(g, phi, 2.0, 1e-8);
    CHECK(std::abs(e.lambda - kPi * kPi) / (kPi * kPi) < 1e-3);
    for (std::size_t i = 0; i < e.U.size(); ++i) CHECK(std::abs(e.U[i] - std::sin(kPi * g->node(i))) < 1e-5);
    check_eigen_invariants(e, phi, 2.0, 1e-8);
}

TEST_CASE("principal eigenvalue for p != 2 matches closed form and shooting") {
    const auto g = unit();
    for (double p : {1.5, 3.0, 4.0}) {
        const double closed = oracle::p_eigenvalue_closed_form(p, 1.0);
        CHECK(oracle::shooting_eigenvalue(p, 1.0) == doctest::Approx(closed).epsilon(1e-7));
        const auto e = principal_eigenpair(g, Field(g, 0.0), p, 1e-8);
        CHECK(std::abs(e.lambda - closed) / closed < 1e-3);
        check_eigen_invariants(e, Field(g, 0.0), p, 1e-8);
    }
}

TEST_CASE("large p: the global stage reaches the Newton basin") {
    for (double p : {6.0, 8.0}) {
        const auto g = unit(256);
        const double closed = oracle::p_eigenvalue_closed_form(p, 1.0);
        const auto e = principal_eigenpair(g, Field(g, 0.0), p, 1e-8 * closed);
        CHECK(std::abs(e.lambda - closed) / closed < 1e-3);
        check_eigen_invariants(e, Field(g, 0.0), p, 1e-8 * closed);
    }
}

TEST_CASE("constant potential shifts the eigenvalue") {
    const auto g = unit(256);
    for (double p : {1.5, 2.0, 3.0}) {
        const double l0 = principal_eigenpair(g, p).lambda;
        for (double c : {0.5, 2.0, 10.0})
            CHECK(std::abs(principal_eigenpair(g, Field(g, c), p).lambda - (l0 + c)) < 1e-6);
    }
}

TEST_CASE("short intervals and tiny grids") {
    const auto g = build_grid(0.4, 0.6, 200);
    const auto e = principal_eigenpair(g, 2.0);
    CHECK(e.lambda == doctest::Approx(25.0 * kPi * kPi).epsilon(1e-4));
    const auto tiny = build_grid(0.0, 1.0, 4);
    const auto et = principal_eigenpair(tiny, 2.0);
    // eigenvalue of the 3x3 second-difference matrix
    const double h = 0.25;
    CHECK(et.lambda == doctest::Approx(4.0 / (h * h) * std::pow(std::sin(kPi * h / 2.0), 2)));
}

TEST_CASE("Rayleigh quotient is scale invariant and minimized by U") {
    const auto g = unit(256);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> c(0.01, 100.0), noise(-0.2, 0.2);
    for (double p : {1.5, 2.0, 3.0}) {
        const Field phi(g, 0.0);
        const auto e = principal_eigenpair(g, phi, p);
        const double R = rayleigh_quotient(e.U, phi, p);
        for (int k = 0; k < 5; ++k) {
            Field s = e.U;
            const double scale = c(rng);
            for (double& v : s.values) v *= scale;
            CHECK(rayleigh_quotient(s, phi, p) == doctest::Approx(R).epsilon(1e-12));
            Field pert = e.U;
            for (std::size_t i = 1; i + 1 < pert.size(); ++i)
                pert[i] *= 1.0 + noise(rng) * std::sin(2 * kPi * g->node(i));
            CHECK(rayleigh_quotient(pert, phi, p) >= R * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("randomized restarts reach the same eigenvalue") {
    const auto g = unit(256);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (double p : {2.0, 3.0}) {
        const double ref = principal_eigenpair(g, p).lambda;
        for (int k = 0; k < 5; ++k) {
            EigenOptions opts;
            Field init(g);
            const double s = 1e-3 + 1e3 * u(rng);
            for (std::size_t i = 1; i + 1 < init.size(); ++i) init[i] = s * u(rng);
            opts.initial = init;
            const auto e = principal_eigenpair(g, Field(g, 0.0), p, 1e-8, opts);
            CHECK(e.lambda == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("gradient stage alone reaches the eigenpair") {
    const auto g = unit(128);
    EigenOptions opts;
    opts.force_gradient_stage = true;
    const auto e = principal_eigenpair(g, Field(g, 0.0), 3.0, 1e-8, opts);
    CHECK(e.lambda == doctest::Approx(principal_eigenpair(g, 3.0).lambda).epsilon(1e-9));
}

TEST_CASE("eigenvalue is strictly monotone in the potential") {
    const auto g = unit(256);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 5.0), pos(0.1, 0.9);
    for (double p : {1.5, 2.0, 3.0}) {
        for (int k = 0; k < 4; ++k) {
            Field phi(g, u(rng)), psi = phi;
            const double center = pos(rng), height = 0.5 + u(rng);
            for (std::size_t i = 0; i < psi.size(); ++i)
                psi[i] += height * std::max(0.0, 1.0 - std::abs(g->node(i) - center) / 0.1);
            CHECK(principal_eigenpair(g, phi, p).lambda < principal_eigenpair(g, psi, p).lambda);
        }
    }
}

TEST_CASE("domain monotonicity and run eigenvalues") {
    const auto g = unit(1000);
    const double whole = principal_eigenpair(g, 2.0).lambda;
    const auto mask = subdomain_mask(g, 0.4, 0.6);
    // run (0.4, 0.6) with Dirichlet neighbours at 0.4 and 0.6
    const double sub = run_eigenvalue(*g, NodeRange{mask.range().first, mask.range().last}, 2.0);
    CHECK(whole < sub);
    CHECK(sub == doctest::Approx(25.0 * kPi * kPi).epsilon(1e-4));
    for (std::size_t len : {1u, 2u, 3u, 7u}) CHECK(run_eigenvalue(*g, NodeRange{100, 100 + len - 1}, 3.0) > 0.0);
    const auto b = coefficient_field(g, VanishingCoefficient{0.4, 0.6, 1.0, 0.1});
    const auto runs = zero_runs(b);
    REQUIRE(runs.size() == 1);
    CHECK(vanishing_set_eigenvalue(b, 2.0) == doctest::Approx(run_eigenvalue(*g, runs[0], 2.0)).epsilon(1e-10));
    // the closed zero set is one node wider on each side than the open mask
    CHECK(runs[0].count() == mask.range().count() + 2);
    CHECK(vanishing_set_eigenvalue(b, 2.0) < sub);
    CHECK(std::isinf(vanishing_set_eigenvalue(Field(g, 1.0), 2.0)));
}

TEST_CASE("solve_alpha: examples") {
    const auto g = unit(512);
    const Field one(g, 1.0);
    for (double p : {2.0, 3.0}) {
        const double l1 = principal_eigenpair(g, p).lambda;
        const auto r = solve_alpha(g, one, l1 + 0.5, p);
        CHECK(r.alpha == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(std::abs(r.eigen.lambda - (l1 + 0.5)) <= 1e-8 * (l1 + 0.5));
        CHECK(r.bracket.first <= r.alpha);
        CHECK(r.alpha <= r.bracket.second);
        CHECK(solve_alpha(g, one, l1, p).alpha == 0.0);
        CHECK_THROWS_AS(solve_alpha(g, one, l1 - 1.0, p), AlphaOutOfRange);
    }
    const auto b = coefficient_field(g, VanishingCoefficient{0.4, 0.6, 1.0, 0.1});
    const double l0 = vanishing_set_eigenvalue(b, 2.0);
    CHECK_THROWS_AS(solve_alpha(g, b, l0, 2.0), AlphaOutOfRange);
    CHECK_THROWS_AS(solve_alpha(g, b, 300.0, 2.0), AlphaOutOfRange);
    const auto r = solve_alpha(g, b, 100.0, 2.0);
    CHECK(std::abs(r.eigen.lambda - 100.0) <= 1e-8 * 100.0);
}

TEST_CASE("lambda_curve: examples") {
    const auto g = unit(512);
    const Field one(g, 1.0);
    const double l1 = principal_eigenpair(g, 2.0).lambda;
    const std::vector<double> a3{0.0, 1.0, 2.0};
    const auto c = lambda_curve(g, one, a3);
    REQUIRE(c.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(c[k].first == a3[k]);
        CHECK(c[k].second == doctest::Approx(l1 + k).epsilon(1e-9));
    }
    const std::vector<double> zero{0.0};
    const auto c0 = lambda_curve(g, one, zero);
    REQUIRE(c0.size() == 1);
    CHECK(c0[0].second == doctest::Approx(l1).epsilon(1e-12));
}

TEST_CASE("lambda_curve for vanishing b is increasing and bounded by the zero-set eigenvalue") {
    const auto g = unit(1000);
    const auto b = coefficient_field(g, VanishingCoefficient{0.4, 0.6, 1.0, 0.1});
    const double cap = vanishing_set_eigenvalue(b, 2.0);
    std::vector<double> alphas;
    for (int k = 0; k <= 12; ++k) alphas.push_back(std::pow(10.0, -2.0 + k * 0.5));
    const auto c = lambda_curve(g, b, alphas, 2.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c[k].second < cap);
        if (k > 0) CHECK(c[k].second > c[k - 1].second);
    }
}
