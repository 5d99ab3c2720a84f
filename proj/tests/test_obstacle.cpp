#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/kernels.hpp"
#include "plap/logistic.hpp"
#include "plap/obstacle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

using namespace plap;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

GridPtr unit(int n = 1024) { return build_grid(0.0, 1.0, n); }

double sup_dist(const Field& a, const Field& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void check_obstacle(const ObstacleResult& r, double p, double a, double tol) {
    REQUIRE(r.existence == ObstacleExistence::Exists);
    const auto& w = r.w;
    CHECK(w[0] == 0.0);
    CHECK(w[w.size() - 1] == 0.0);
    for (double v : w.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-10);
    }
    CHECK(std::abs(norm(w, kInf) - 1.0) < 1e-6);
    const double eps = p == 2.0 ? 0.0 : 1e-8;
    const auto L = apply_p_laplacian(w, {p, eps, 0.0, 2.0});
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        // exactly one of: strictly below the plateau, or on the coincidence set
        CHECK((w[i] < 1.0 - 1e-8) != static_cast<bool>(r.coincidence[i]));
        if (r.coincidence[i]) {
            // nonzero on the plateau edge; only the sign is constrained
            CHECK(w[i] == 1.0);
            CHECK(L[i] >= -tol);
        } else {
            CHECK(std::abs(L[i] - a * std::pow(w[i], p - 1.0)) <= tol);
        }
    }
    CHECK(r.residual_pde <= tol);
}

}  // namespace

TEST_CASE("free boundary: no solution below lambda1") {
    const auto g = unit();
    const double l1 = principal_eigenpair(g, 2.0).lambda;
    const auto r = solve_free_boundary(g, 2.0, 0.5 * l1);
    CHECK(r.existence == ObstacleExistence::NoSolution);
    CHECK(r.lambda1 == doctest::Approx(l1).epsilon(1e-12));
}

TEST_CASE("free boundary at a = lambda1 is the eigenfunction") {
    const auto g = unit();
    for (double p : {2.0, 3.0}) {
        const auto e = principal_eigenpair(g, p);
        const auto r = solve_free_boundary(g, p, e.lambda, 1e-7);
        REQUIRE(r.existence == ObstacleExistence::Exists);
        CHECK(std::count(r.coincidence.begin(), r.coincidence.end(), true) == 0);
        CHECK(sup_dist(r.w, e.U) < 1e-3);
    }
}

TEST_CASE("free boundary, p = 2, a = 4 pi^2: symmetric plateau, invariants, logistic limit") {
    const auto g = unit();
    const double a = 4.0 * kPi * kPi;
    const auto r = solve_free_boundary(g, 2.0, a);
    check_obstacle(r, 2.0, a, 1e-8);
    const auto n = r.w.size();
    CHECK(r.coincidence[n / 2]);
    CHECK_FALSE(r.coincidence[n / 5]);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(r.w[i] - r.w[n - 1 - i]) < 1e-8);
        CHECK(r.coincidence[i] == r.coincidence[n - 1 - i]);
    }
    // continuum plateau is [1/4, 3/4] at a = 4π²
    std::size_t first = 0;
    while (!r.coincidence[first]) ++first;
    CHECK(g->node(first) == doctest::Approx(0.25).epsilon(2e-3));

    const auto u32 = solve_logistic(g, Field(g, 1.0), {2.0, 0.0, a, 32.0});
    const auto u64 = solve_logistic(g, Field(g, 1.0), {2.0, 0.0, a, 64.0});
    CHECK(sup_dist(u64.u, r.w) < sup_dist(u32.u, r.w));
    CHECK(sup_dist(u64.u, r.w) < 0.1);
}

TEST_CASE("free boundary, p = 3") {
    const auto g = unit();
    const double l1 = principal_eigenpair(g, 3.0).lambda;
    const double a = 3.0 * l1;
    const auto r = solve_free_boundary(g, 3.0, a, 1e-7);
    check_obstacle(r, 3.0, a, 1e-7);
    const auto n = r.w.size();
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r.w[i] - r.w[n - 1 - i]) < 1e-8);
}

TEST_CASE("logistic solutions approach the free boundary as q grows") {
    const auto g = unit();
    const double a = 3.0 * kPi * kPi;
    const auto w = solve_free_boundary(g, 2.0, a);
    double prev = kInf;
    std::optional<Field> warm;
    for (double q : {8.0, 16.0, 32.0, 64.0}) {
        const auto u = solve_logistic(g, Field(g, 1.0), {2.0, 0.0, a, q}, warm, 1e-8);
        const double d = sup_dist(u.u, w.w);
        CHECK(d < prev);
        prev = d;
        warm = u.u;
    }
}

TEST_CASE("multistart uniqueness") {
    const auto g = unit();
    const double a = 4.0 * kPi * kPi;
    const auto m = multistart_uniqueness(g, 2.0, a, 5);
    REQUIRE(m.runs.size() == 5);
    CHECK(m.max_pairwise_distance < 1e-6);
    CHECK_FALSE(m.all_no_solution);

    const auto m1 = multistart_uniqueness(g, 2.0, a, 2, 1e-8, 77);
    const auto m2 = multistart_uniqueness(g, 2.0, a, 2, 1e-8, 77);
    CHECK(sup_dist(m1.runs[0].w, m2.runs[0].w) == 0.0);
    CHECK(sup_dist(m1.runs[1].w, m2.runs[1].w) == 0.0);

    const auto none = multistart_uniqueness(g, 2.0, 5.0, 3);
    CHECK(none.all_no_solution);
    for (const auto& r : none.runs) CHECK(r.existence == ObstacleExistence::NoSolution);
    CHECK_THROWS_AS(multistart_uniqueness(g, 2.0, a, 1), RangeError);
}

TEST_CASE("VI with no unconstrained nodes equals the free-boundary solution") {
    const auto g = unit(512);
    const double a = 3.0 * kPi * kPi;
    const auto w = solve_free_boundary(g, 2.0, a);
    const auto vi = solve_vi(g, 2.0, a, std::vector<bool>(g->size(), false));
    CHECK(sup_dist(vi.u, w.w) < 1e-8);
}

TEST_CASE("VI against the composed reference, p = 2, Omega0 = (0.45, 0.55), a = 60") {
    const auto g = unit();
    const auto mask = subdomain_mask(g, 0.45, 0.55);
    const double a = 60.0;
    const auto w = solve_free_boundary(g, 2.0, a);
    for (std::size_t i = mask.range().first - 1; i <= mask.range().last + 1; ++i) REQUIRE(w.w[i] == 1.0);
    const auto vi = solve_vi(g, 2.0, a, mask);
    const auto ref = compose_reference_vi(w, mask, 2.0, a);
    CHECK(sup_dist(vi.u, ref) < 1e-3);
    CHECK(vi_probe_defect(vi.u, mask.inside, 2.0, a) < 1e-6);
    CHECK(vi.vi_defect < 1e-6);
    CHECK(vi.u[0] == 0.0);
    for (std::size_t i = 0; i < vi.u.size(); ++i) {
        if (!mask.inside[i]) CHECK(vi.u[i] <= 1.0 + 1e-10);
        else CHECK_FALSE(vi.active[i]);
    }
    // the composed interior part rises above 1 and meets w continuously
    for (std::size_t i = mask.range().first; i <= mask.range().last; ++i) CHECK(ref[i] >= 1.0);
    CHECK(std::abs(ref[mask.range().first - 1] - 1.0) <= 1e-10);
    CHECK(std::abs(ref[mask.range().last + 1] - 1.0) <= 1e-10);
}

TEST_CASE("VI feasibility window and p = 3") {
    const auto g = unit(512);
    const auto mask = subdomain_mask(g, 0.45, 0.55);
    CHECK_THROWS_AS(solve_vi(g, 2.0, 5.0, mask), InfeasibleWindow);
    CHECK_THROWS_AS(solve_vi(g, 2.0, 1000.0, mask), InfeasibleWindow);
    const double l1 = principal_eigenpair(g, 3.0).lambda;
    const auto vi = solve_vi(g, 3.0, 4.0 * l1, mask, 1e-7);
    for (std::size_t i = 0; i < vi.u.size(); ++i)
        if (!mask.inside[i]) CHECK(vi.u[i] <= 1.0 + 1e-10);
    CHECK(vi_probe_defect(vi.u, mask.inside, 3.0, 4.0 * l1) < 1e-6);
}

TEST_CASE("compose_reference_vi: small a gives a flat interior, plateau checks") {
    const auto g = unit(200);
    const auto mask = subdomain_mask(g, 0.45, 0.55);
    // synthetic plateau w = 1 everywhere inside
    ObstacleResult flat;
    flat.w = Field(g, 1.0);
    flat.w[0] = flat.w[flat.w.size() - 1] = 0.0;
    flat.coincidence.assign(g->size(), true);
    flat.coincidence[0] = flat.coincidence[g->size() - 1] = false;
    const auto ref = compose_reference_vi(flat, mask, 2.0, 1e-9);
    for (std::size_t i = mask.range().first; i <= mask.range().last; ++i) CHECK(std::abs(ref[i] - 1.0) < 1e-8);

    const auto w = solve_free_boundary(g, 2.0, 2.0 * kPi * kPi);  // plateau about [0.354, 0.646]
    CHECK_THROWS_AS(compose_reference_vi(w, subdomain_mask(g, 0.1, 0.3), 2.0, 2.0 * kPi * kPi), PlateauTooSmall);
    CHECK_THROWS_AS(compose_reference_vi(flat, mask, 2.0, 1e4), PlateauTooSmall);
}

TEST_CASE("probe defect detects a non-solution") {
    const auto g = unit(256);
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * std::sin(kPi * g->node(i));
    const std::vector<bool> none(g->size(), false);
    CHECK(vi_probe_defect(u, none, 2.0, 4.0 * kPi * kPi) > 1e-3);
}
