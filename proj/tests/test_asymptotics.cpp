#include "plap/asymptotics.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/obstacle.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace plap;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr unit(int n = 1024) { return build_grid(0.0, 1.0, n); }

std::vector<double> halving(double p, int k) {
    std::vector<double> s;
    for (int i = 1; i <= k; ++i) s.push_back(p - 1.0 + std::ldexp(1.0, -i));
    return s;
}

void check_bound(const SweepResult& s, double p, double a, double bmin) {
    for (const auto& r : s.records) {
        REQUIRE(r.ok());
        CHECK((r.q - p + 1.0) * r.log_M <= std::log(a / bmin + 1e-6));
        CHECK(r.M > 0.0);
        CHECK(r.profile_dist >= 0.0);
    }
}

}  // namespace

TEST_CASE("low sweep, alpha = 0.5: gap shrinks, M decreases, profile converges") {
    const auto g = unit();
    const Field one(g, 1.0);
    for (double p : {2.0, 3.0}) {
        const double l1 = principal_eigenpair(g, p).lambda;
        const auto s = sweep_q_low(g, one, p, l1 + 0.5, halving(p, 8));
        REQUIRE(s.records.size() == 8);
        CHECK(s.alpha == doctest::Approx(0.5).epsilon(1e-6));
        check_bound(s, p, l1 + 0.5, 1.0);
        const auto& last = s.records.back();
        CHECK(std::abs(last.log_gap) < 0.02);
        CHECK(last.profile_dist < 0.02);
        for (std::size_t k = 4; k < s.records.size(); ++k) {
            CHECK(std::abs(s.records[k].log_gap) < std::abs(s.records[k - 1].log_gap));
            CHECK(s.records[k].M < s.records[k - 1].M);
            CHECK(s.records[k].profile_dist < s.records[k - 1].profile_dist);
        }
    }
}

TEST_CASE("low sweep, alpha = 2: M increases along the tail") {
    const auto g = unit();
    const Field one(g, 1.0);
    const double l1 = principal_eigenpair(g, 2.0).lambda;
    const auto s = sweep_q_low(g, one, 2.0, l1 + 2.0, halving(2.0, 8));
    check_bound(s, 2.0, l1 + 2.0, 1.0);
    for (std::size_t k = 4; k < s.records.size(); ++k) CHECK(s.records[k].M > s.records[k - 1].M);
    CHECK(std::abs(s.records.back().log_gap) < 0.02);
}

TEST_CASE("sweeps with one entry and bad schedules") {
    const auto g = unit(256);
    const Field one(g, 1.0);
    const double l1 = principal_eigenpair(g, 2.0).lambda;
    CHECK(sweep_q_low(g, one, 2.0, l1 + 1.0, {1.5}).records.size() == 1);
    CHECK(sweep_q_high(g, one, 2.0, 2.0 * l1, {4.0}).records.size() == 1);
    CHECK_THROWS_AS(sweep_q_low(g, one, 2.0, l1 + 1.0, {}), PreconditionError);
    CHECK_THROWS_AS(sweep_q_low(g, one, 2.0, l1 + 1.0, {1.25, 1.5}), PreconditionError);
    CHECK_THROWS_AS(sweep_q_low(g, one, 2.0, l1 + 1.0, {1.5, 0.9}), PreconditionError);
    CHECK_THROWS_AS(sweep_q_high(g, one, 2.0, 2.0 * l1, {8.0, 4.0}), PreconditionError);
    CHECK_THROWS_AS(sweep_q_low(g, one, 2.0, l1 - 1.0, {1.5}), PreconditionError);
}

TEST_CASE("high sweep against the free boundary") {
    const auto g = unit();
    const Field one(g, 1.0);
    const double a = 2.0 * kPi * kPi;
    const std::vector<double> qs{4.0, 8.0, 16.0, 32.0, 64.0};
    const auto s = sweep_q_high(g, one, 2.0, a, qs);
    REQUIRE(s.records.size() == 5);
    check_bound(s, 2.0, a, 1.0);
    for (std::size_t k = 1; k < s.records.size(); ++k) {
        CHECK(s.records[k].profile_dist < s.records[k - 1].profile_dist);
        CHECK(std::abs(s.records[k].M - 1.0) < std::abs(s.records[k - 1].M - 1.0));
    }
    CHECK(s.records.back().profile_dist < 0.05);

    // The sup bound M <= a^{1/(q-p+1)} is what holds for large q; the tighter
    // u <= 1.05 is not attained at q = 32 (M ≈ 1.0998 there).
    for (const auto& r : s.records)
        CHECK(norm(r.u, std::numeric_limits<double>::infinity()) <= std::pow(a, 1.0 / (r.q - 1.0)) + 1e-9);
    CHECK(s.records.back().M < 1.05);

    const auto w = solve_free_boundary(g, 2.0, a);
    double d = 0.0;
    for (std::size_t i = 0; i < w.w.size(); ++i) d = std::max(d, std::abs(w.w[i] - s.reference[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("high sweep for vanishing b uses the VI solution") {
    const auto g = unit(512);
    const auto b = coefficient_field(g, VanishingCoefficient{0.45, 0.55, 1.0, 0.05});
    const double a = 60.0;
    const auto s = sweep_q_high(g, b, 2.0, a, {4.0, 8.0, 16.0, 32.0});
    for (std::size_t k = 1; k < s.records.size(); ++k)
        CHECK(s.records[k].profile_dist < s.records[k - 1].profile_dist);
    const auto vi = solve_vi(g, 2.0, a, subdomain_mask(g, 0.45, 0.55));
    double d = 0.0;
    for (std::size_t i = 0; i < vi.u.size(); ++i) d = std::max(d, std::abs(vi.u[i] - s.reference[i]));
    CHECK(d < 1e-12);
}

TEST_CASE("critical_constant_c: examples") {
    const auto g = unit();
    const Field one(g, 1.0);
    Field flat(g, 1.0);
    flat[0] = flat[flat.size() - 1] = 0.0;
    CHECK(critical_constant_c(flat, one, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    for (double p : {2.0, 3.0}) {
        const auto U = principal_eigenpair(g, p).U;
        CHECK(critical_constant_c(U, one, p) <= 1.0);
    }
    const auto U = principal_eigenpair(g, 2.0).U;
    const double oracle_c = oracle::log_weighted_constant([](double x) { return std::sin(kPi * x); }, 2.0, 0.0, 1.0);
    CHECK(critical_constant_c(U, one, 2.0) == doctest::Approx(oracle_c).epsilon(1e-4));
    // exponent variant
    CHECK(critical_constant_c(U, one, 2.0, 2.0) == doctest::Approx(critical_constant_c(U, one, 2.0)));
    CHECK(critical_constant_c(U, one, 2.0, 2.01) != critical_constant_c(U, one, 2.0));
}

TEST_CASE("extrapolate_limit") {
    std::vector<double> geo;
    for (int k = 1; k <= 8; ++k) geo.push_back(1.0 + std::ldexp(1.0, -k));
    const auto e = extrapolate_limit(geo);
    CHECK(std::abs(e.value - 1.0) < 1e-6);
    CHECK(e.trend);
    const auto c = extrapolate_limit(std::vector<double>{3.0, 3.0, 3.0, 3.0});
    CHECK(c.value == 3.0);
    CHECK_THROWS_AS(extrapolate_limit(std::vector<double>{1.0, 2.0}), TooFewRecords);
    const auto osc = extrapolate_limit(std::vector<double>{1.0, 2.0, 1.0, 2.0});
    CHECK_FALSE(osc.trend);
    CHECK(osc.value == 2.0);

    std::vector<SweepRecord> recs(4);
    for (int k = 0; k < 4; ++k) recs[k].M = 2.0 - std::ldexp(1.0, -k);
    recs[3].flag = "NoConvergence";
    const auto r = extrapolate_limit(recs, [](const SweepRecord& x) { return x.M; });
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    recs[2].flag = "NoConvergence";
    CHECK_THROWS_AS(extrapolate_limit(recs, [](const SweepRecord& x) { return x.M; }), TooFewRecords);
}

TEST_CASE("sweep CSV schema") {
    std::vector<SweepRecord> recs(1);
    recs[0].q = 1.5;
    recs[0].M = 0.25;
    recs[0].iterations = 3;
    std::ostringstream os;
    write_sweep_csv(os, recs);
    const auto text = os.str();
    CHECK(text.rfind("q,M,log_gap,profile_dist,iterations,residual,flag\n", 0) == 0);
    CHECK(text.find("1.5,0.25,0,0,3,0,ok\n") != std::string::npos);
}
