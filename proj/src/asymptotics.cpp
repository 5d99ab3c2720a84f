#include "plap/asymptotics.hpp"

#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/field_io.hpp"
#include "plap/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace plap {

namespace {

double sup_distance(const Field& x, const Field& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

std::string error_name(const std::exception& e) {
    const std::string what = e.what();
    return what.substr(0, what.find(':'));
}

void check_schedule(const std::vector<double>& schedule, double p, bool increasing) {
    if (schedule.empty()) throw PreconditionError("empty q schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > p - 1.0)) throw PreconditionError("every q must exceed p - 1");
        if (i > 0 && (increasing ? !(schedule[i] > schedule[i - 1])
                                 : !(schedule[i] < schedule[i - 1])))
            throw PreconditionError(increasing ? "q schedule must increase strictly"
                                               : "q schedule must decrease strictly");
    }
}

ExistenceWindow checked_window(const GridPtr& grid, const Field& b, double p, double a) {
    auto w = existence_window(grid, b, p);
    if (!(a > w.lambda1)) throw PreconditionError("a = " + short_num(a) + " <= lambda_1 = " + short_num(w.lambda1));
    if (w.lambda_omega0 && !(a < *w.lambda_omega0))
        throw PreconditionError("a = " + short_num(a) + " >= lambda_1 of the zero set = " +
                                short_num(*w.lambda_omega0));
    return w;
}

// One record per q; the metric fills profile_dist.
template <class Metric>
void run_sweep(const GridPtr& grid, const Field& b, double p, double a,
               const std::vector<double>& schedule, double tol, SweepResult& out,
               bool predict_scale, Metric&& metric) {
    LogisticOptions opts;
    opts.tol = tol;
    opts.window = out.window;
    std::optional<ScaledGuess> prev;
    double prev_delta = 0.0;
    for (double q : schedule) {
        const double delta = q - p + 1.0;
        SweepRecord rec;
        rec.q = q;
        if (prev) {
            opts.guess = *prev;
            // Keeps (q-p+1) ln M fixed across the step.
            if (predict_scale) opts.guess->log_scale = prev_delta * prev->log_scale / delta;
        }
        try {
            auto res = solve_logistic(grid, b, {p, 0.0, a, q}, opts);
            rec.M = res.M;
            rec.log_M = res.log_M;
            rec.log_gap = delta * res.log_M - std::log(out.alpha);
            rec.iterations = res.iterations;
            rec.residual = res.residual;
            rec.u = std::move(res.u);
            rec.profile = std::move(res.profile);
            rec.profile_dist = metric(rec);
            prev = ScaledGuess{rec.profile, rec.log_M};
            prev_delta = delta;
        } catch (const Error& e) {
            rec.flag = error_name(e);
            rec.M = rec.log_M = rec.log_gap = rec.profile_dist = rec.residual =
                std::numeric_limits<double>::quiet_NaN();
        }
        out.records.push_back(std::move(rec));
    }
}

}  // namespace

SweepResult sweep_q_low(GridPtr grid, const Field& b, double p, double a,
                        const std::vector<double>& schedule, double tol) {
    check_schedule(schedule, p, false);
    SweepResult out;
    out.window = checked_window(grid, b, p, a);
    const auto ar = solve_alpha(grid, b, a, p);
    out.alpha = ar.alpha;
    out.U_alpha = ar.eigen.U;
    run_sweep(grid, b, p, a, schedule, tol, out, true,
              [&](const SweepRecord& r) { return sup_distance(r.profile, out.U_alpha); });
    return out;
}

SweepResult sweep_q_high(GridPtr grid, const Field& b, double p, double a,
                         const std::vector<double>& schedule, double tol) {
    check_schedule(schedule, p, true);
    SweepResult out;
    out.window = checked_window(grid, b, p, a);
    const auto ar = solve_alpha(grid, b, a, p);
    out.alpha = ar.alpha;
    out.U_alpha = ar.eigen.U;
    const auto runs = zero_runs(b);
    if (runs.empty()) {
        out.reference = solve_free_boundary(grid, p, a, tol).w;
    } else {
        std::vector<bool> unconstrained(grid->size(), false);
        for (const auto& r : runs)
            for (std::size_t i = r.first; i <= r.last; ++i) unconstrained[i] = true;
        out.reference = solve_vi(grid, p, a, unconstrained, tol).u;
    }
    run_sweep(grid, b, p, a, schedule, tol, out, false,
              [&](const SweepRecord& r) { return sup_distance(r.u, out.reference); });
    return out;
}

double critical_constant_c(const Field& U1, const Field& b, double p, double denominator_exponent) {
    require_same_grid(U1, b, "critical_constant_c");
    const std::size_t n = U1.size();
    std::vector<double> num(n, 0.0), den(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = U1[i];
        if (u > 0.0) {
            num[i] = b[i] * std::pow(u, p) * std::log(u);
            den[i] = b[i] * std::pow(u, denominator_exponent);
        }
    }
    const double h = U1.grid->h();
    return std::exp(kernel::trapezoid(num, h) / kernel::trapezoid(den, h));
}

double critical_constant_c(const Field& U1, const Field& b, double p) {
    return critical_constant_c(U1, b, p, p);
}

LimitEstimate extrapolate_limit(const std::vector<double>& x) {
    if (x.size() < 3) throw TooFewRecords("need at least 3 values, got " + std::to_string(x.size()));
    LimitEstimate est;
    const std::size_t k = x.size();
    const double d1 = x[k - 2] - x[k - 3];
    const double d2 = x[k - 1] - x[k - 2];
    est.last_gap = std::abs(d2);
    if (d1 == 0.0 && d2 == 0.0) {
        est.value = x[k - 1];
        est.trend = true;
        return est;
    }
    bool monotone = true;
    for (std::size_t i = 1; i < k; ++i)
        if ((x[i] - x[i - 1]) * d2 < 0.0) monotone = false;
    if (monotone && std::abs(d2) < std::abs(d1)) {
        est.value = x[k - 1] - d2 * d2 / (d2 - d1);
        est.trend = true;
    } else {
        est.value = x[k - 1];
    }
    return est;
}

LimitEstimate extrapolate_limit(const std::vector<SweepRecord>& records,
                                const std::function<double(const SweepRecord&)>& selector) {
    std::vector<double> x;
    for (const auto& r : records)
        if (r.ok()) x.push_back(selector(r));
    if (x.size() < 3) throw TooFewRecords("need at least 3 valid records, got " + std::to_string(x.size()));
    return extrapolate_limit(x);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << "q,M,log_gap,profile_dist,iterations,residual,flag\n";
    for (const auto& r : records)
        os << format_double(r.q) << ',' << format_double(r.M) << ',' << format_double(r.log_gap)
           << ',' << format_double(r.profile_dist) << ',' << r.iterations << ','
           << format_double(r.residual) << ',' << r.flag << '\n';
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_sweep_csv(os, records);
}

}  // namespace plap
