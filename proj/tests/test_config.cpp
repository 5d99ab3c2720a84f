#include "plap/config.hpp"
#include "plap/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace plap;

TEST_CASE("file values with flag overrides") {
    const auto c = parse_config("p = 2\na = 12.0", {{"q", "3"}});
    CHECK(c.p == 2.0);
    CHECK(c.a.kind == GrowthRate::Kind::absolute);
    CHECK(c.a.value == 12.0);
    CHECK(c.q == 3.0);
    const auto o = parse_config("p = 2\nq = 5\n", {{"q", "3"}, {"n-cells", "64"}});
    CHECK(o.q == 3.0);
    CHECK(o.n_cells == 64);
}

TEST_CASE("empty file with all flags") {
    const auto c = parse_config("", {{"subcommand", "sweep-high"},
                                     {"p", "3"},
                                     {"a", "lambda1*2"},
                                     {"q", "4"},
                                     {"schedule", "8,16"},
                                     {"coef", "vanishing:0.3,0.6,2"},
                                     {"x_left", "-1"},
                                     {"x_right", "2"},
                                     {"omega0_left", "0.3"},
                                     {"omega0_right", "0.6"},
                                     {"n_cells", "128"},
                                     {"tol", "1e-7"},
                                     {"out", "somewhere"},
                                     {"seed", "9"},
                                     {"emit_gnuplot", "true"},
                                     {"k", "3"}});
    CHECK(c.subcommand == Subcommand::sweep_high);
    CHECK(c.a.kind == GrowthRate::Kind::lambda1_times);
    CHECK(c.a.resolve(10.0) == 20.0);
    CHECK(schedule_values(c) == std::vector<double>{8.0, 16.0});
    CHECK(*c.omega0_right == 0.6);
    CHECK(c.emit_gnuplot);
    CHECK(c.seed == 9);
    CHECK(c.out == "somewhere");
}

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.subcommand == Subcommand::eigen);
    CHECK(c.p == 2.0);
    CHECK(c.n_cells == 1024);
    CHECK(c.tol == 1e-8);
    CHECK(c.x_left == 0.0);
    CHECK(c.x_right == 1.0);
    CHECK(c.a.resolve(5.0) == 6.0);
    CHECK_FALSE(c.emit_gnuplot);
}

TEST_CASE("comments, blank lines and whitespace") {
    const auto c = parse_config("# header\n\n   p =   3   # trailing\n\ta=lambda1+0.25\n");
    CHECK(c.p == 3.0);
    CHECK(c.a.kind == GrowthRate::Kind::lambda1_plus);
    CHECK(c.a.value == 0.25);
    CHECK(parse_config("a = lambda1-0.5").a.resolve(2.0) == 1.5);
    CHECK(parse_config("a = lambda1").a.resolve(2.0) == 2.0);
}

TEST_CASE("ParseError carries the offending line") {
    auto line_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("p = 2\nnonsense\n") == 2);
    CHECK(line_of("p = 2\n\n# c\nq =\n") == 4);
    CHECK(line_of("= 3") == 1);
    CHECK(line_of("p = two") == 1);
    CHECK(line_of("p = 2\nn_cells = 1.5") == 2);
    CHECK(line_of("emit_gnuplot = maybe") == 1);
    CHECK(line_of("a = lambda2+1") == 1);
    CHECK(line_of("coef = cubic:1") == 1);
}

TEST_CASE("UnknownKey") {
    CHECK_THROWS_AS(parse_config("alpha = 2"), UnknownKey);
    CHECK_THROWS_AS(parse_config("", {{"bogus", "1"}}), UnknownKey);
    CHECK_THROWS_AS(parse_config("subcommand = frobnicate"), UnknownKey);
}

TEST_CASE("RangeError") {
    CHECK_THROWS_AS(parse_config("p = 0.5"), RangeError);
    CHECK_THROWS_AS(parse_config("p = 1"), RangeError);
    CHECK_THROWS_AS(parse_config("subcommand = solve\np = 3\nq = 2"), RangeError);
    CHECK_NOTHROW(parse_config("subcommand = eigen\np = 3\nq = 2"));
    CHECK_THROWS_AS(parse_config("n_cells = 3"), RangeError);
    CHECK_THROWS_AS(parse_config("tol = 0"), RangeError);
    CHECK_THROWS_AS(parse_config("x_left = 1\nx_right = 0"), RangeError);
    CHECK_THROWS_AS(parse_config("omega0_left = 0.4"), RangeError);
    CHECK_THROWS_AS(parse_config("omega0_left = 0.4\nomega0_right = 1.2"), RangeError);
    CHECK_THROWS_AS(parse_config("k = 1"), RangeError);
    CHECK_THROWS_AS(parse_config("a = lambda1*0"), RangeError);
    CHECK_THROWS_AS(parse_config("coef = constant:-1"), RangeError);
    CHECK_THROWS_AS(parse_config("subcommand = sweep-low\nschedule = 0.5,0.25"), RangeError);
    CHECK_THROWS_AS(parse_config("subcommand = sweep-low\nschedule = halving:0"), RangeError);
}

TEST_CASE("schedule specs") {
    auto c = parse_config("subcommand = sweep-low\np = 3");
    const auto low = schedule_values(c);
    REQUIRE(low.size() == 8);
    CHECK(low.front() == 2.5);
    CHECK(low.back() == 2.0 + std::ldexp(1.0, -8));
    c = parse_config("subcommand = sweep-high");
    CHECK(schedule_values(c) == std::vector<double>{4, 8, 16, 32, 64});
    c = parse_config("subcommand = sweep-high\nschedule = doubling:3:24");
    CHECK(schedule_values(c) == std::vector<double>{3, 6, 12, 24});
    CHECK(schedule_values(parse_config("subcommand = solve")).empty());
}

TEST_CASE("canonical text and hash") {
    const auto a = parse_config("p = 2\na = 12");
    const auto b = parse_config("a = 12.0\n# reorder\np = 2.0\n");
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(fnv1a(canonical_text(a)) == fnv1a(canonical_text(b)));
    CHECK(fnv1a(canonical_text(a)) != fnv1a(canonical_text(parse_config("p = 2\na = 12\nseed = 2"))));
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    // the output directory does not enter the hash
    CHECK(canonical_text(parse_config("out = x")) == canonical_text(parse_config("out = y")));
}
