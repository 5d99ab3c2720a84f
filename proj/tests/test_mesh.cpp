#include "plap/errors.hpp"
#include "plap/mesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace plap;

TEST_CASE("build_grid: uniform partition") {
    const auto g = build_grid(0.0, 1.0, 4);
    REQUIRE(g->size() == 5);
    const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(g->node(i) == expect[i]);
    CHECK(build_grid(-1.0, 1.0, 8)->h() == 0.25);
    CHECK(g->interior_size() == 3);
}

TEST_CASE("build_grid: rejects bad domains") {
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 3), InvalidDomain);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 8), InvalidDomain);
    CHECK_THROWS_AS(build_grid(2.0, 1.0, 8), InvalidDomain);
}

TEST_CASE("grid nodes are strictly increasing and equispaced") {
    for (int n : {4, 7, 100, 1024, 4097}) {
        const auto g = build_grid(-0.3, 2.1, n);
        CHECK(g->node(0) == -0.3);
        CHECK(g->node(g->size() - 1) == 2.1);
        for (std::size_t i = 0; i + 1 < g->size(); ++i) {
            CHECK(g->node(i + 1) > g->node(i));
            CHECK(std::abs(g->node(i + 1) - g->node(i) - g->h()) < 1e-13);
        }
    }
}

TEST_CASE("refining by 2 reproduces the coarse nodes exactly") {
    for (int n : {4, 10, 256, 1000}) {
        const auto coarse = build_grid(0.0, 1.0, n);
        const auto fine = build_grid(0.0, 1.0, 2 * n);
        for (std::size_t i = 0; i < coarse->size(); ++i) CHECK(fine->node(2 * i) == coarse->node(i));
    }
}

TEST_CASE("subdomain_mask: membership and counting") {
    const auto g10 = build_grid(0.0, 1.0, 10);
    const auto m = subdomain_mask(g10, 0.4, 0.6);
    REQUIRE(m.count() == 1);
    CHECK(m.inside[5]);
    CHECK(m.range() == NodeRange{5, 5});

    const auto m100 = subdomain_mask(build_grid(0.0, 1.0, 100), 0.4, 0.6);
    CHECK(m100.count() == 19);
    CHECK(m100.range() == NodeRange{41, 59});
}

TEST_CASE("subdomain_mask: rejects subdomains that touch the boundary or miss every node") {
    const auto g = build_grid(0.0, 1.0, 10);
    CHECK_THROWS_AS(subdomain_mask(g, 0.0, 0.5), InvalidSubdomain);
    CHECK_THROWS_AS(subdomain_mask(g, 0.5, 1.0), InvalidSubdomain);
    CHECK_THROWS_AS(subdomain_mask(g, 0.6, 0.4), InvalidSubdomain);
    CHECK_THROWS_AS(subdomain_mask(g, 0.41, 0.49), InvalidSubdomain);
}

TEST_CASE("subdomain_mask is one contiguous interior run") {
    const auto g = build_grid(0.0, 1.0, 97);
    for (double a0 : {0.05, 0.2, 0.33}) {
        const auto m = subdomain_mask(g, a0, a0 + 0.4);
        const auto r = m.range();
        CHECK(r.first > 0);
        CHECK(r.last < g->size() - 1);
        for (std::size_t i = 0; i < g->size(); ++i) {
            const bool in = i >= r.first && i <= r.last;
            CHECK(m.inside[i] == in);
            CHECK(in == (a0 < g->node(i) && g->node(i) < a0 + 0.4));
        }
    }
}

TEST_CASE("coefficient_field: constant and vanishing descriptors") {
    const auto g8 = build_grid(0.0, 1.0, 8);
    const auto one = coefficient_field(g8, ConstantCoefficient{1.0});
    for (double v : one.values) CHECK(v == 1.0);

    const auto g = build_grid(0.0, 1.0, 20);
    const auto b = coefficient_field(g, VanishingCoefficient{0.4, 0.6, 1.0, 0.1});
    CHECK(b[10] == 0.0);  // x = 0.5
    CHECK(b[1] == doctest::Approx(1.0));  // x = 0.05
    CHECK(b[8] == 0.0);   // endpoint x = 0.4
    CHECK(b[12] == 0.0);  // endpoint x = 0.6

    CHECK_THROWS_AS(coefficient_field(g8, ConstantCoefficient{-1.0}), NegativeCoefficient);
    CHECK_THROWS_AS(coefficient_field(g8, VanishingCoefficient{0.4, 0.6, -1.0, 0.1}), NegativeCoefficient);
}

TEST_CASE("vanishing coefficient is zero exactly on the closed zero set and positive elsewhere") {
    const auto g = build_grid(0.0, 1.0, 1000);
    const VanishingCoefficient d{0.4, 0.6, 2.0, 0.05};
    const auto b = coefficient_field(g, d);
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = g->node(i);
        if (x >= 0.4 - 1e-12 && x <= 0.6 + 1e-12) CHECK(b[i] == 0.0);
        else CHECK(b[i] > 0.0);
        CHECK(b[i] <= d.level);
    }
    const auto runs = zero_runs(b);
    REQUIRE(runs.size() == 1);
    CHECK(g->node(runs[0].first) == doctest::Approx(0.4));
    CHECK(g->node(runs[0].last) == doctest::Approx(0.6));
}

TEST_CASE("vanishing coefficient is continuous: adjacent jumps bounded by C h") {
    for (int n : {50, 200, 1000}) {
        const auto g = build_grid(0.0, 1.0, n);
        const VanishingCoefficient d{0.3, 0.55, 1.5, 0.1};
        const auto b = coefficient_field(g, d);
        const double C = 2.0 * d.level / d.ramp;  // Lipschitz constant of the ramp
        for (std::size_t i = 0; i + 1 < b.size(); ++i)
            CHECK(std::abs(b[i + 1] - b[i]) <= C * g->h() * (1.0 + 1e-12));
    }
}

TEST_CASE("coefficient descriptors parse and print") {
    const auto c = parse_coefficient("constant:2.5");
    REQUIRE(std::holds_alternative<ConstantCoefficient>(c));
    CHECK(std::get<ConstantCoefficient>(c).value == 2.5);
    const auto v = parse_coefficient("vanishing:0.4,0.6,3");
    REQUIRE(std::holds_alternative<VanishingCoefficient>(v));
    CHECK(std::get<VanishingCoefficient>(v).level == 3.0);
    CHECK(std::get<VanishingCoefficient>(v).ramp == 0.1);
    const auto w = parse_coefficient("vanishing:0.4,0.6,1e6,0.01");
    CHECK(parse_coefficient(to_string(w)).index() == w.index());
    CHECK(to_string(parse_coefficient(to_string(w))) == to_string(w));
    CHECK_THROWS_AS(parse_coefficient("quadratic:1"), RangeError);
    CHECK_THROWS_AS(parse_coefficient("constant:abc"), RangeError);
}

TEST_CASE("fields share a grid and reject mismatched lengths") {
    const auto g = build_grid(0.0, 1.0, 8);
    Field f(g, 3.0);
    CHECK(f.size() == 9);
    CHECK_THROWS_AS(Field(g, std::vector<double>(4, 0.0)), GridMismatch);
    Field h(build_grid(0.0, 2.0, 8));
    CHECK_THROWS_AS(require_same_grid(f, h, "test"), GridMismatch);
    CHECK_NOTHROW(require_same_grid(f, Field(g), "test"));
}

TEST_CASE("run_grid spans a zero run plus its Dirichlet neighbours") {
    const auto g = build_grid(0.0, 1.0, 100);
    const auto rg = run_grid(*g, NodeRange{41, 59});
    CHECK(rg->size() == 21);
    CHECK(rg->x_left() == doctest::Approx(0.40));
    CHECK(rg->x_right() == doctest::Approx(0.60));
    CHECK(rg->h() == doctest::Approx(g->h()));
    CHECK_THROWS_AS(run_grid(*g, NodeRange{0, 5}), InvalidSubdomain);
}
