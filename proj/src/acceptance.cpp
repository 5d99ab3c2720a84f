#include "plap/acceptance.hpp"

#include "oracles.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/kernels.hpp"
#include "plap/obstacle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

namespace plap {

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kEigenRelTol = 1e-3;
constexpr double kShootingAgreement = 1e-6;
constexpr double kShiftTol = 1e-6;
constexpr double kAlphaIdentityTol = 1e-6;
constexpr double kGapTol = 0.02;
constexpr double kProfileTol = 0.02;
constexpr std::size_t kTail = 4;
constexpr double kConstantTol = 0.05;
constexpr double kBoundSlack = 1e-6;
constexpr double kHighDistTol = 0.05;
constexpr double kSupOneTol = 1e-6;
constexpr double kPlateauPdeTol = 1e-6;
constexpr double kMultistartTol = 1e-6;
constexpr double kEigenfunctionTol = 1e-3;
constexpr double kCurveRelTol = 0.02;
constexpr double kVIMatchTol = 1e-3;
constexpr double kVIDefectTol = 1e-6;
constexpr double kJacobianRelTol = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr int kKernelCells = 64;
constexpr double kKernelEps = 1e-1;
constexpr double kMonotoneSlack = 1e-8;

// Zero set of b for the curve check: a steep wall so that α ≤ 1e4 already
// confines the eigenfunction to the zero set.
const VanishingCoefficient kSteepWell{0.4, 0.6, 1e6, 0.01};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double sup_distance(const Field& x, const Field& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

std::vector<double> low_schedule(double p) {
    std::vector<double> s;
    for (int k = 1; k <= 8; ++k) s.push_back(p - 1.0 + std::ldexp(1.0, -k));
    return s;
}

std::vector<const SweepRecord*> tail(const SweepResult& s) {
    std::vector<const SweepRecord*> t;
    const std::size_t n = s.records.size();
    for (std::size_t i = n >= kTail ? n - kTail : 0; i < n; ++i) t.push_back(&s.records[i]);
    return t;
}

bool all_ok(const SweepResult& s) {
    return std::all_of(s.records.begin(), s.records.end(), [](const auto& r) { return r.ok(); });
}

template <class Key>
bool strictly(const std::vector<const SweepRecord*>& t, Key key, bool increasing) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double prev = key(*t[i - 1]);
        const double cur = key(*t[i]);
        if (increasing ? !(cur > prev) : !(cur < prev)) return false;
    }
    return true;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
    return fmt("%s [%2d] %s: %s (%.1f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
               r.detail.c_str(), r.seconds);
}

AcceptanceSuite::AcceptanceSuite(AcceptanceOptions opts)
    : opts_(std::move(opts)), grid_(build_grid(0.0, 1.0, opts_.n_cells)) {
    if (!opts_.out_dir.empty()) std::filesystem::create_directories(opts_.out_dir);
}

void AcceptanceSuite::dump(const std::string& name, const SweepResult& s) const {
    if (opts_.out_dir.empty()) return;
    write_sweep_csv((std::filesystem::path(opts_.out_dir) / (name + ".csv")).string(), s.records);
}

const SweepResult& AcceptanceSuite::low_sweep(double p, double a_offset) {
    const std::string key = fmt("low_p%g_a%g", p, a_offset);
    auto it = sweeps_.find(key);
    if (it != sweeps_.end()) return it->second;
    const Field one(grid_, 1.0);
    const double a = principal_eigenpair(grid_, p).lambda + a_offset;
    auto s = sweep_q_low(grid_, one, p, a, low_schedule(p));
    dump(key, s);
    return sweeps_.emplace(key, std::move(s)).first->second;
}

const SweepResult& AcceptanceSuite::vanishing_low_sweep(double p) {
    const std::string key = fmt("low_vanishing_p%g", p);
    auto it = sweeps_.find(key);
    if (it != sweeps_.end()) return it->second;
    const Field b = coefficient_field(grid_, VanishingCoefficient{});
    const auto window = existence_window(grid_, b, p);
    const double a = 0.25 * (window.lambda1 + *window.lambda_omega0);
    auto s = sweep_q_low(grid_, b, p, a, low_schedule(p));
    dump(key, s);
    return sweeps_.emplace(key, std::move(s)).first->second;
}

const SweepResult& AcceptanceSuite::high_sweep() {
    const std::string key = "high_p2";
    auto it = sweeps_.find(key);
    if (it != sweeps_.end()) return it->second;
    const Field one(grid_, 1.0);
    auto s = sweep_q_high(grid_, one, 2.0, 2.0 * kPi * kPi, {4, 8, 16, 32, 64});
    dump(key, s);
    return sweeps_.emplace(key, std::move(s)).first->second;
}

CriterionResult AcceptanceSuite::run(int id) {
    static const char* titles[] = {
        "",
        "Eigen closed forms",
        "Constant-potential shift",
        "Low-q limit, alpha < 1",
        "Low-q limit, alpha > 1",
        "Critical constant at alpha = 1",
        "A-priori sup bound",
        "High-q limit against the free boundary",
        "Free-boundary uniqueness and existence",
        "Eigenvalue curve for vanishing b",
        "Low-q limit for vanishing b",
        "VI against the composed solution",
        "Kernel derivative checks",
        "Monotonicity in a",
    };
    if (id < 1 || id > kCount) throw RangeError("criterion id must be in 1.." + std::to_string(kCount));
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        switch (id) {
            case 1: r = eigen_closed_forms(); break;
            case 2: r = potential_shift(); break;
            case 3: r = low_limit(3, 0.5); break;
            case 4: r = low_limit(4, 2.0); break;
            case 5: r = critical_constant(); break;
            case 6: r = apriori_bound(); break;
            case 7: r = free_boundary_limit(); break;
            case 8: r = uniqueness(); break;
            case 9: r = vanishing_curve(); break;
            case 10: r = vanishing_low_limit(); break;
            case 11: r = vi_construction(); break;
            case 12: r = kernel_checks(); break;
            case 13: r = monotonicity(); break;
        }
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.title = titles[id];
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all() {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCount; ++id) out.push_back(run(id));
    return out;
}

CriterionResult AcceptanceSuite::eigen_closed_forms() {
    CriterionResult r;
    r.pass = true;
    for (double p : {2.0, 1.5, 3.0}) {
        const double lam = principal_eigenpair(grid_, p).lambda;
        const double exact = oracle::p_eigenvalue_closed_form(p, 1.0);
        const double shot = oracle::shooting_eigenvalue(p, 1.0);
        const double rel = std::abs(lam - exact) / exact;
        const double agree = std::abs(shot - exact) / exact;
        r.pass = r.pass && rel < kEigenRelTol && agree < kShootingAgreement;
        r.detail += fmt("p=%g lambda=%.8g closed=%.8g rel=%.2e shooting=%.8g; ", p, lam, exact,
                        rel, shot);
    }
    return r;
}

CriterionResult AcceptanceSuite::potential_shift() {
    CriterionResult r;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
        const double base = principal_eigenpair(grid_, p).lambda;
        for (double alpha : {0.5, 2.0, 10.0})
            worst = std::max(worst, std::abs(principal_eigenpair(grid_, Field(grid_, alpha), p).lambda -
                                             (base + alpha)));
    }
    r.pass = worst < kShiftTol;
    r.detail = fmt("max |lambda(alpha) - lambda(0) - alpha| = %.2e over p in {1.5,2,3}, alpha in {0.5,2,10}", worst);
    return r;
}

CriterionResult AcceptanceSuite::low_limit(int id, double a_offset) {
    CriterionResult r;
    r.pass = true;
    for (double p : {2.0, 3.0}) {
        const auto& s = low_sweep(p, a_offset);
        const auto& last = s.records.back();
        const auto t = tail(s);
        const bool alpha_ok = std::abs(s.alpha - a_offset) < kAlphaIdentityTol;
        const bool gap_ok = all_ok(s) && std::abs(last.log_gap) < kGapTol;
        const bool gap_tail = all_ok(s) && strictly(t, [](const SweepRecord& x) { return std::abs(x.log_gap); }, false);
        const bool prof_ok = all_ok(s) && last.profile_dist < kProfileTol;
        bool ok = alpha_ok && gap_ok && gap_tail && prof_ok;
        std::string trend;
        if (id == 4) {
            const bool up = all_ok(s) && strictly(t, [](const SweepRecord& x) { return x.log_M; }, true);
            ok = ok && up;
            trend = up ? " M increasing on tail" : " M NOT increasing on tail";
        }
        r.pass = r.pass && ok;
        r.detail += fmt("p=%g alpha=%.8g |gap|=%.2e%s profile=%.2e%s; ", p, s.alpha,
                        std::abs(last.log_gap), gap_tail ? " (decreasing)" : " (NOT decreasing)",
                        last.profile_dist, trend.c_str());
    }
    return r;
}

CriterionResult AcceptanceSuite::critical_constant() {
    CriterionResult r;
    r.pass = true;
    for (double p : {2.0, 3.0}) {
        const auto& s = low_sweep(p, 1.0);
        const Field one(grid_, 1.0);
        const double c = critical_constant_c(s.U_alpha, one, p);
        const double q_last = s.records.back().q;
        const double c_printed = critical_constant_c(s.U_alpha, one, p, q_last + 1.0);
        const auto est = extrapolate_limit(s.records, [](const SweepRecord& x) { return x.M; });
        const bool ok = std::abs(est.value - c) < kConstantTol;
        r.pass = r.pass && ok;
        r.detail += fmt("p=%g M_lim=%.6f c=%.6f (|diff|=%.3f) c[q+1]=%.6f 1/c=%.6f; ", p,
                        est.value, c, std::abs(est.value - c), c_printed, 1.0 / c);
    }
    return r;
}

CriterionResult AcceptanceSuite::apriori_bound() {
    CriterionResult r;
    std::size_t checked = 0;
    double worst = -std::numeric_limits<double>::infinity();
    auto check = [&](double p, double a, double q, double log_M) {
        // min b = 1 for every constant-coefficient run below.
        const double lhs = std::exp((q - p + 1.0) * log_M);
        worst = std::max(worst, lhs - a);
        ++checked;
    };
    auto check_sweep = [&](const SweepResult& s, double p, double a) {
        for (const auto& rec : s.records)
            if (rec.ok()) check(p, a, rec.q, rec.log_M);
    };
    for (double p : {2.0, 3.0})
        for (double off : {0.5, 2.0, 1.0})
            check_sweep(low_sweep(p, off), p, principal_eigenpair(grid_, p).lambda + off);
    check_sweep(high_sweep(), 2.0, 2.0 * kPi * kPi);
    const Field one(grid_, 1.0);
    const double l1 = principal_eigenpair(grid_, 2.0).lambda;
    for (double off : {0.3, 0.6}) {
        auto res = solve_logistic(grid_, one, {2.0, 0.0, l1 + off, 2.0});
        check(2.0, l1 + off, 2.0, res.log_M);
    }
    r.pass = checked > 0 && worst <= kBoundSlack;
    r.detail = fmt("%zu solutions, max (M^(q-p+1) - a/min b) = %.3e", checked, worst);
    return r;
}

CriterionResult AcceptanceSuite::free_boundary_limit() {
    CriterionResult r;
    const double a = 2.0 * kPi * kPi;
    const auto& s = high_sweep();
    std::vector<const SweepRecord*> all;
    for (const auto& rec : s.records) all.push_back(&rec);
    const bool dec = all_ok(s) && strictly(all, [](const SweepRecord& x) { return x.profile_dist; }, false);
    const double final_dist = s.records.back().profile_dist;

    const auto w = solve_free_boundary(grid_, 2.0, a);
    const double sup = norm(w.w);
    Field Lw = apply_p_laplacian(w.w, {2.0, 0.0, 0.0, 2.0});
    double pde = 0.0;
    for (std::size_t i = 1; i + 1 < w.w.size(); ++i)
        if (w.w[i] < 1.0 - 1e-6) pde = std::max(pde, std::abs(Lw[i] - a * w.w[i]));
    r.pass = dec && final_dist < kHighDistTol && std::abs(sup - 1.0) < kSupOneTol &&
             pde < kPlateauPdeTol;
    std::string dists;
    for (const auto& rec : s.records) dists += fmt("%.4f ", rec.profile_dist);
    r.detail = fmt("dist over q=4..64: %s%s; |sup w - 1|=%.1e; pde residual off plateau=%.1e",
                   dists.c_str(), dec ? "(decreasing)" : "(NOT decreasing)", std::abs(sup - 1.0), pde);
    return r;
}

CriterionResult AcceptanceSuite::uniqueness() {
    CriterionResult r;
    const auto eig = principal_eigenpair(grid_, 2.0);
    const auto ms = multistart_uniqueness(grid_, 2.0, 4.0 * kPi * kPi, 5);
    const auto below = solve_free_boundary(grid_, 2.0, 0.5 * eig.lambda);
    const auto at = solve_free_boundary(grid_, 2.0, eig.lambda);
    const bool empty = std::none_of(at.coincidence.begin(), at.coincidence.end(), [](bool c) { return c; });
    const double d = sup_distance(at.w, eig.U);
    r.pass = ms.max_pairwise_distance < kMultistartTol &&
             below.existence == ObstacleExistence::NoSolution &&
             at.existence == ObstacleExistence::Exists && empty && d < kEigenfunctionTol;
    r.detail = fmt("multistart k=5 spread=%.2e; a=lambda1/2 -> %s; a=lambda1 -> |w-U|=%.2e, coincidence %s",
                   ms.max_pairwise_distance, to_string(below.existence).c_str(), d,
                   empty ? "empty" : "NOT empty");
    return r;
}

CriterionResult AcceptanceSuite::vanishing_curve() {
    CriterionResult r;
    const Field b = coefficient_field(grid_, kSteepWell);
    std::vector<double> alphas;
    for (int k = 0; k <= 24; ++k) alphas.push_back(std::pow(10.0, -2.0 + 0.25 * k));
    const auto curve = lambda_curve(grid_, b, alphas, 2.0);
    bool inc = true;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (!(curve[i].second > curve[i - 1].second)) inc = false;
    const double target = 25.0 * kPi * kPi;
    const double rel = std::abs(curve.back().second - target) / target;
    const double discrete = vanishing_set_eigenvalue(b, 2.0);
    r.pass = inc && rel < kCurveRelTol && curve.back().second < discrete;
    r.detail = fmt("b=%s; %s; lambda(1e4)=%.6g, 25pi^2=%.6g, rel=%.2e; zero-set eigenvalue %.6g",
                   to_string(CoefficientDescriptor{kSteepWell}).c_str(),
                   inc ? "strictly increasing" : "NOT strictly increasing", curve.back().second,
                   target, rel, discrete);
    return r;
}

CriterionResult AcceptanceSuite::vanishing_low_limit() {
    CriterionResult r;
    r.pass = true;
    for (double p : {2.0, 3.0}) {
        const auto& s = vanishing_low_sweep(p);
        const auto& last = s.records.back();
        const auto t = tail(s);
        const bool gap_tail = all_ok(s) && strictly(t, [](const SweepRecord& x) { return std::abs(x.log_gap); }, false);
        const bool ok = all_ok(s) && std::abs(last.log_gap) < kGapTol && gap_tail &&
                        last.profile_dist < kProfileTol;
        r.pass = r.pass && ok;
        r.detail += fmt("p=%g alpha=%.6g |gap|=%.2e%s profile=%.2e ln M=%.4g; ", p, s.alpha,
                        std::abs(last.log_gap), gap_tail ? " (decreasing)" : " (NOT decreasing)",
                        last.profile_dist, last.log_M);
    }
    return r;
}

CriterionResult AcceptanceSuite::vi_construction() {
    CriterionResult r;
    const auto mask = subdomain_mask(grid_, 0.45, 0.55);
    const NodeRange range = mask.range();
    const double lambda0 = run_eigenvalue(*grid_, range, 2.0);
    double a = 60.0;
    std::optional<ObstacleResult> w;
    for (; a < lambda0; a *= 2.0) {
        auto cand = solve_free_boundary(grid_, 2.0, a);
        bool covered = true;
        for (std::size_t i = range.first - 1; i <= range.last + 1; ++i)
            covered = covered && cand.coincidence[i];
        if (covered) {
            w = std::move(cand);
            break;
        }
    }
    if (!w) {
        r.pass = false;
        r.detail = fmt("skipped: no a below lambda1(Omega0)=%.6g gives a plateau covering Omega0", lambda0);
        return r;
    }
    const Field ref = compose_reference_vi(*w, mask, 2.0, a);
    const auto vi = solve_vi(grid_, 2.0, a, mask);
    const double d = sup_distance(ref, vi.u);
    r.pass = d < kVIMatchTol && vi.vi_defect < kVIDefectTol;
    r.detail = fmt("a=%g (plateau covers Omega0); |u_vi - u_ref|=%.2e; probe defect=%.2e", a, d, vi.vi_defect);
    return r;
}

namespace {

struct DerivativeErrors {
    double jacobian = 0.0;
    double gradient = 0.0;
};

// Smooth positive u = sin(πx)(1 + small modes), b = 1.5 + cosine modes and a
// direction v of unit sup-norm; same draws for every grid.
DerivativeErrors derivative_errors(GridPtr grid) {
    DerivativeErrors worst;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coef(-0.5, 0.5), pick(0.0, 1.0);
    const double exps[] = {1.5, 2.0, 3.0, 4.0, 2.5};
    const double h = grid->h();
    for (int trial = 0; trial < 10; ++trial) {
        const double p = exps[trial % 5];
        const PLapParams par{p, kKernelEps, 5.0 + 10.0 * pick(rng), p - 1.0 + 0.1 + 3.0 * pick(rng)};
        double cu[4], cb[4], cv[4];
        for (int k = 0; k < 4; ++k) {
            cu[k] = 0.4 * coef(rng);
            cb[k] = coef(rng);
            cv[k] = 2.0 * coef(rng);
        }
        Field u(grid), b(grid), v(grid);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = grid->node(i);
            double mu = 1.0, mb = 1.5, mv = 0.0;
            for (int k = 0; k < 4; ++k) {
                mu += cu[k] * std::sin((k + 2) * kPi * x);
                mb += cb[k] * std::cos((k + 1) * kPi * x);
                mv += cv[k] * std::sin((k + 1) * kPi * x);
            }
            u[i] = std::max(0.0, std::sin(kPi * x) * mu);
            b[i] = mb;
            v[i] = mv;
        }
        u[0] = u[u.size() - 1] = v[0] = v[v.size() - 1] = 0.0;
        const double vmax = norm(v, std::numeric_limits<double>::infinity());
        for (double& x : v.values) x /= vmax;

        const auto J = linearize(u, b, par);
        const std::vector<double> vin(v.values.begin() + 1, v.values.end() - 1);
        const auto Jv = J.apply(vin);
        Field up = u, um = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
            up[i] += kFdStep * v[i];
            um[i] -= kFdStep * v[i];
        }
        const auto Rp = residual_logistic(up, b, par);
        const auto Rm = residual_logistic(um, b, par);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < Jv.size(); ++k) {
            const double fd = (Rp[k + 1] - Rm[k + 1]) / (2.0 * kFdStep);
            num = std::max(num, std::abs(fd - Jv[k]));
            den = std::max(den, std::abs(Jv[k]));
        }
        worst.jacobian = std::max(worst.jacobian, num / den);

        // dE/dt = Σ h (-Δ_p u) v
        const auto Lu = apply_p_laplacian(u, par);
        double dir = 0.0, scale = 0.0;
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            dir += h * Lu[i] * v[i];
            scale += h * std::abs(Lu[i] * v[i]);
        }
        const double fd = (p_energy(up, p, par.eps) - p_energy(um, p, par.eps)) / (2.0 * kFdStep);
        worst.gradient = std::max(worst.gradient, std::abs(fd - dir) / scale);
    }
    return worst;
}

}  // namespace

CriterionResult AcceptanceSuite::kernel_checks() {
    CriterionResult r;
    const auto coarse = derivative_errors(build_grid(0.0, 1.0, kKernelCells));
    const auto fine = derivative_errors(grid_);
    r.pass = coarse.jacobian < kJacobianRelTol && coarse.gradient < kJacobianRelTol;
    r.detail = fmt("10 random smooth fields, t=1e-5, eps=%.0e, n=%d: Jacobian rel err %.2e, energy "
                   "gradient rel err %.2e; at n=%d (roundoff-bound, not judged): %.2e, %.2e",
                   kKernelEps, kKernelCells, coarse.jacobian, coarse.gradient, grid_->n_cells(),
                   fine.jacobian, fine.gradient);
    return r;
}

CriterionResult AcceptanceSuite::monotonicity() {
    CriterionResult r;
    const Field one(grid_, 1.0);
    const double l1 = principal_eigenpair(grid_, 2.0).lambda;
    const auto u1 = solve_logistic(grid_, one, {2.0, 0.0, l1 + 0.3, 2.0});
    const auto u2 = solve_logistic(grid_, one, {2.0, 0.0, l1 + 0.6, 2.0});
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < u1.u.size(); ++i) worst = std::max(worst, u1.u[i] - u2.u[i]);
    const bool check = monotonicity_check(grid_, one, 2.0, 2.0, l1 + 0.3, l1 + 0.6);
    r.pass = worst <= kMonotoneSlack && check;
    r.detail = fmt("max(u_low - u_high) = %.3e; M %.6f <= %.6f", worst, u1.M, u2.M);
    return r;
}

}  // namespace plap
