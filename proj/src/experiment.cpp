#include "plap/experiment.hpp"

#include "plap/acceptance.hpp"
#include "plap/asymptotics.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/field_io.hpp"
#include "plap/logistic.hpp"
#include "plap/obstacle.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef PLAP_VERSION
#define PLAP_VERSION "0.0.0"
#endif

namespace plap {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

class Report {
public:
    void line(const std::string& key, const std::string& value) { os_ << key << ": " << value << '\n'; }
    void line(const std::string& key, double value) { line(key, num(value)); }
    void text(const std::string& t) { os_ << t << '\n'; }
    bool check(const std::string& what, bool pass) {
        os_ << "check " << what << ": " << (pass ? "PASS" : "FAIL") << '\n';
        return pass;
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

struct Context {
    const ExperimentConfig& cfg;
    fs::path dir;
    GridPtr grid;
    Field b;
    Report report;
    std::vector<std::string> plots;  // gnuplot plot clauses

    std::string path(const std::string& name) const { return (dir / name).string(); }

    void plot(const std::string& file, const std::string& using_cols, const std::string& title) {
        plots.push_back("'" + file + "' using " + using_cols + " with lines title '" + title + "'");
    }

    void runlog(double a, double q, double M, int iterations, double residual,
                const std::string& verdict) const {
        const fs::path p = dir / "runlog.csv";
        const bool fresh = !fs::exists(p);
        std::ofstream os(p, std::ios::app);
        if (fresh) os << "p,a,q,n_cells,M,iterations,residual,verdict\n";
        os << format_double(cfg.p) << ',' << format_double(a) << ',' << format_double(q) << ','
           << cfg.n_cells << ',' << format_double(M) << ',' << iterations << ','
           << format_double(residual) << ',' << verdict << '\n';
    }
};

double interval_lambda1(const ExperimentConfig& cfg) {
    return oracle::p_eigenvalue_closed_form(cfg.p, cfg.x_right - cfg.x_left);
}

double discrete_lambda1(const Context& c) { return principal_eigenpair(c.grid, c.cfg.p).lambda; }

double min_b(const Field& b) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < b.size(); ++i) m = std::min(m, b[i]);
    return m;
}

// Window verdict before any sweep; returns false (and reports) outside it.
bool inside_window(Context& c, double a, const ExistenceWindow& w) {
    c.report.line("lambda1", w.lambda1);
    if (w.lambda_omega0) c.report.line("lambda1(zero set of b)", *w.lambda_omega0);
    Existence e = Existence::Exists;
    if (a <= w.lambda1) e = Existence::BelowLambda1;
    else if (w.lambda_omega0 && a >= *w.lambda_omega0) e = Existence::AboveLambdaOmega0;
    c.report.line("verdict", to_string(e));
    return e == Existence::Exists;
}

int run_eigen(Context& c) {
    const auto& cfg = c.cfg;
    const auto r = principal_eigenpair(c.grid, Field(c.grid, 0.0), cfg.p, cfg.tol);
    const double closed = interval_lambda1(cfg);
    const double rel = std::abs(r.lambda - closed) / closed;
    write_field_csv(c.path("eigenfunction.csv"), r.U, "U");
    c.plot("eigenfunction.csv", "1:2", "U");
    c.report.line("lambda", r.lambda);
    c.report.line("closed form (p-1)(pi_p/L)^p", closed);
    c.report.line("rel error", sci(rel));
    c.report.line("residual", sci(r.residual));
    c.report.line("iterations", std::to_string(r.iterations));
    c.report.check("rel error < 1e-3", rel < 1e-3);
    c.report.check("residual <= tol", r.residual <= cfg.tol);
    return exit_code::ok;
}

int run_solve(Context& c) {
    const auto& cfg = c.cfg;
    const auto window = existence_window(c.grid, c.b, cfg.p);
    const double a = cfg.a.resolve(window.lambda1);
    c.report.line("a", a);
    LogisticOptions opts;
    opts.tol = cfg.tol;
    opts.window = window;
    const auto r = solve_logistic(c.grid, c.b, {cfg.p, 0.0, a, cfg.q}, opts);
    c.report.line("lambda1", window.lambda1);
    if (window.lambda_omega0) c.report.line("lambda1(zero set of b)", *window.lambda_omega0);
    c.report.line("verdict", to_string(r.existence));
    if (r.existence != Existence::Exists) {
        c.runlog(a, cfg.q, 0.0, 0, 0.0, to_string(r.existence));
        return exit_code::nonexistence;
    }
    c.runlog(a, cfg.q, r.M, r.iterations, r.residual, to_string(r.existence));
    write_field_csv(c.path("solution.csv"), r.u, "u");
    write_field_csv(c.path("profile.csv"), r.profile, "profile");
    c.plot("solution.csv", "1:2", "u");
    c.report.line("M", r.M);
    c.report.line("ln M", r.log_M);
    c.report.line("iterations", std::to_string(r.iterations));
    c.report.line("residual", sci(r.residual));
    c.report.check("residual <= tol", r.residual <= cfg.tol);
    const double bmin = min_b(c.b);
    if (bmin > 0.0) {
        const double lhs = (cfg.q - cfg.p + 1.0) * r.log_M;
        c.report.check("M^(q-p+1) <= a / min b", lhs <= std::log(a / bmin + 1e-6));
    }
    return exit_code::ok;
}

void report_records(Context& c, const SweepResult& s) {
    write_sweep_csv(c.path("sweep.csv"), s.records);
    c.plot("sweep.csv", "1:2", "M(q)");
    char buf[160];
    c.report.text("q M log_gap profile_dist iterations residual flag");
    for (const auto& rec : s.records) {
        std::snprintf(buf, sizeof buf, "%.10g %.10g %.3e %.3e %d %.3e %s", rec.q, rec.M, rec.log_gap,
                      rec.profile_dist, rec.iterations, rec.residual, rec.flag.c_str());
        c.report.text(buf);
    }
}

int sweep_exit(const SweepResult& s) {
    for (const auto& rec : s.records)
        if (!rec.ok()) return exit_code::no_convergence;
    return exit_code::ok;
}

void bound_check(Context& c, const SweepResult& s, double a) {
    const double bmin = min_b(c.b);
    if (!(bmin > 0.0)) return;
    bool ok = true;
    for (const auto& rec : s.records)
        if (rec.ok()) ok = ok && (rec.q - c.cfg.p + 1.0) * rec.log_M <= std::log(a / bmin + 1e-6);
    c.report.check("M^(q-p+1) <= a / min b on every record", ok);
}

int run_sweep_low(Context& c) {
    const auto& cfg = c.cfg;
    const auto window = existence_window(c.grid, c.b, cfg.p);
    const double a = cfg.a.resolve(window.lambda1);
    c.report.line("a", a);
    if (!inside_window(c, a, window)) return exit_code::nonexistence;
    const auto s = sweep_q_low(c.grid, c.b, cfg.p, a, schedule_values(cfg), cfg.tol);
    for (const auto& rec : s.records) c.runlog(a, rec.q, rec.M, rec.iterations, rec.residual, rec.flag);
    write_field_csv(c.path("U_alpha.csv"), s.U_alpha, "U_alpha");
    c.report.line("alpha", s.alpha);
    report_records(c, s);
    std::vector<double> logm;
    const SweepRecord* last = nullptr;
    for (const auto& rec : s.records)
        if (rec.ok()) {
            logm.push_back(rec.log_M);
            last = &rec;
        }
    if (last) {
        c.report.check("|gap| < 0.02 at the finest q", std::abs(last->log_gap) < 0.02);
        c.report.check("profile distance < 0.02 at the finest q", last->profile_dist < 0.02);
    }
    if (logm.size() >= 3) {
        const auto lim = extrapolate_limit(logm);
        c.report.line("extrapolated ln M", lim.value);
        c.report.line("extrapolated M", std::exp(lim.value));
        c.report.line("trend", lim.trend ? "monotone, shrinking increments" : "none");
    }
    if (std::abs(s.alpha - 1.0) < 1e-3) {
        c.report.line("c (denominator exponent p)", critical_constant_c(s.U_alpha, c.b, cfg.p));
        const double q_last = s.records.back().q;
        c.report.line("c (denominator exponent q+1 at the finest q)",
                      critical_constant_c(s.U_alpha, c.b, cfg.p, q_last + 1.0));
    }
    bound_check(c, s, a);
    return sweep_exit(s);
}

int run_sweep_high(Context& c) {
    const auto& cfg = c.cfg;
    const auto window = existence_window(c.grid, c.b, cfg.p);
    const double a = cfg.a.resolve(window.lambda1);
    c.report.line("a", a);
    if (!inside_window(c, a, window)) return exit_code::nonexistence;
    const auto s = sweep_q_high(c.grid, c.b, cfg.p, a, schedule_values(cfg), cfg.tol);
    for (const auto& rec : s.records) c.runlog(a, rec.q, rec.M, rec.iterations, rec.residual, rec.flag);
    write_field_csv(c.path("reference.csv"), s.reference, "w");
    c.plot("reference.csv", "1:2", "limit profile");
    report_records(c, s);
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& rec : s.records) {
        if (!rec.ok()) continue;
        decreasing = decreasing && rec.profile_dist < prev;
        prev = rec.profile_dist;
    }
    c.report.check("distance to the limit profile decreasing in q", decreasing);
    bound_check(c, s, a);
    return sweep_exit(s);
}

int run_obstacle(Context& c) {
    const auto& cfg = c.cfg;
    const double a = cfg.a.resolve(discrete_lambda1(c));
    c.report.line("a", a);
    const auto r = solve_free_boundary(c.grid, cfg.p, a, cfg.tol);
    c.report.line("lambda1", r.lambda1);
    c.report.line("verdict", to_string(r.existence));
    if (r.existence == ObstacleExistence::NoSolution) return exit_code::nonexistence;
    write_field_csv(c.path("w.csv"), r.w, "w");
    write_mask_csv(c.path("coincidence.csv"), *c.grid, r.coincidence, "coincidence");
    c.plot("w.csv", "1:2", "w");
    c.plot("coincidence.csv", "1:2", "coincidence");
    const auto nc = std::count(r.coincidence.begin(), r.coincidence.end(), true);
    c.report.line("coincidence nodes", std::to_string(nc));
    c.report.line("active-set sweeps", std::to_string(r.iterations));
    c.report.line("pde residual", sci(r.residual_pde));
    c.report.line("complementarity residual", sci(r.residual_comp));
    c.report.check("sup w = 1", std::abs(norm(r.w, std::numeric_limits<double>::infinity()) - 1.0) < 1e-6);
    c.report.check("pde residual <= tol", r.residual_pde <= cfg.tol);
    const auto ms = multistart_uniqueness(c.grid, cfg.p, a, cfg.k, cfg.tol, cfg.seed);
    c.report.line("multistart runs", std::to_string(cfg.k));
    c.report.line("multistart spread", sci(ms.max_pairwise_distance));
    c.report.check("multistart spread < 1e-6", ms.max_pairwise_distance < 1e-6);
    return exit_code::ok;
}

int run_vi(Context& c) {
    const auto& cfg = c.cfg;
    double a0 = 0.0, b0 = 0.0;
    if (cfg.omega0_left) {
        a0 = *cfg.omega0_left;
        b0 = *cfg.omega0_right;
    } else if (const auto* v = std::get_if<VanishingCoefficient>(&cfg.coef)) {
        a0 = v->a0;
        b0 = v->b0;
    } else {
        throw RangeError("vi needs omega0_left/omega0_right or a vanishing coef");
    }
    const auto mask = subdomain_mask(c.grid, a0, b0);
    const double a = cfg.a.resolve(discrete_lambda1(c));
    c.report.line("a", a);
    c.report.line("omega0", "(" + num(a0) + ", " + num(b0) + ")");
    const auto r = solve_vi(c.grid, cfg.p, a, mask, cfg.tol);
    write_field_csv(c.path("vi.csv"), r.u, "u");
    write_mask_csv(c.path("active.csv"), *c.grid, r.active, "active");
    c.plot("vi.csv", "1:2", "u");
    const double defect = vi_probe_defect(r.u, mask.inside, cfg.p, a);
    c.report.line("iterations", std::to_string(r.iterations));
    c.report.line("pde residual", sci(r.residual_pde));
    c.report.line("vi defect", sci(r.vi_defect));
    c.report.line("probe defect", sci(defect));
    c.report.check("probe defect < 1e-6", defect < 1e-6);
    const auto w = solve_free_boundary(c.grid, cfg.p, a, cfg.tol);
    if (w.existence != ObstacleExistence::Exists) {
        c.report.line("reference", "free-boundary problem has no solution at this a");
        return exit_code::ok;
    }
    try {
        const auto ref = compose_reference_vi(w, mask, cfg.p, a, cfg.tol);
        double d = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) d = std::max(d, std::abs(ref[i] - r.u[i]));
        write_field_csv(c.path("reference.csv"), ref, "u_ref");
        c.report.line("distance to composed reference", sci(d));
        c.report.check("distance to composed reference < 1e-3", d < 1e-3);
    } catch (const PlateauTooSmall& e) {
        c.report.line("reference", std::string("skipped, ") + e.what());
    }
    return exit_code::ok;
}

int run_verify_all(Context& c) {
    AcceptanceSuite suite({c.cfg.n_cells, c.dir.string()});
    bool all = true;
    for (const auto& r : suite.run_all()) {
        c.report.text(format_result(r));
        all = all && r.pass;
    }
    return all ? exit_code::ok : exit_code::checks_failed;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_gnuplot(const Context& c) {
    std::ofstream os(c.dir / "plot.gp");
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 'x'\n";
    if (c.plots.empty()) {
        os << "# nothing to plot for " << to_string(c.cfg.subcommand) << '\n';
        return;
    }
    os << "plot ";
    for (std::size_t i = 0; i < c.plots.size(); ++i) os << (i ? ", \\\n     " : "") << c.plots[i];
    os << '\n';
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UnknownKey*>(&e) ||
        dynamic_cast<const RangeError*>(&e) || dynamic_cast<const BadExponent*>(&e) ||
        dynamic_cast<const InvalidDomain*>(&e) || dynamic_cast<const InvalidSubdomain*>(&e) ||
        dynamic_cast<const NegativeCoefficient*>(&e) || dynamic_cast<const PreconditionError*>(&e))
        return exit_code::config_error;
    if (dynamic_cast<const AlphaOutOfRange*>(&e) || dynamic_cast<const InfeasibleWindow*>(&e))
        return exit_code::nonexistence;
    return exit_code::no_convergence;
}

const char* version() { return PLAP_VERSION; }

std::string output_directory(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("PLAP_OUT"); env && *env) return env;
    return cfg.out;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
    RunSummary summary;
    summary.out_dir = output_directory(cfg);
    const std::string started = utc_timestamp();
    Context c{cfg, fs::path(summary.out_dir), nullptr, Field(), Report(), {}};
    fs::create_directories(c.dir);

    const std::uint64_t hash = fnv1a(canonical_text(cfg));
    char hash_hex[17];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx", static_cast<unsigned long long>(hash));
    c.report.line("subcommand", to_string(cfg.subcommand));
    c.report.line("config hash", hash_hex);
    c.report.line("p", cfg.p);
    if (cfg.subcommand == Subcommand::solve) c.report.line("q", cfg.q);
    c.report.line("interval", "(" + num(cfg.x_left) + ", " + num(cfg.x_right) + ")");
    c.report.line("n_cells", std::to_string(cfg.n_cells));
    c.report.line("coef", to_string(cfg.coef));

    try {
        c.grid = build_grid(cfg.x_left, cfg.x_right, cfg.n_cells);
        c.b = coefficient_field(c.grid, cfg.coef);
        switch (cfg.subcommand) {
            case Subcommand::eigen: summary.exit_code = run_eigen(c); break;
            case Subcommand::solve: summary.exit_code = run_solve(c); break;
            case Subcommand::sweep_low: summary.exit_code = run_sweep_low(c); break;
            case Subcommand::sweep_high: summary.exit_code = run_sweep_high(c); break;
            case Subcommand::obstacle: summary.exit_code = run_obstacle(c); break;
            case Subcommand::vi: summary.exit_code = run_vi(c); break;
            case Subcommand::verify_all: summary.exit_code = run_verify_all(c); break;
        }
    } catch (const Error& e) {
        summary.exit_code = exit_code_for(e);
        c.report.line("error", e.what());
    }
    c.report.line("exit", std::to_string(summary.exit_code));
    summary.report = c.report.str();

    std::ofstream(c.dir / "report.txt") << summary.report;
    if (cfg.emit_gnuplot) write_gnuplot(c);
    std::ofstream(c.dir / "manifest.txt", std::ios::app)
        << "started=" << started << " finished=" << utc_timestamp() << " plap=" << version()
        << " compiler=\"" << __VERSION__ << "\" subcommand=" << to_string(cfg.subcommand)
        << " config_hash=" << hash_hex << " seed=" << cfg.seed << " exit=" << summary.exit_code
        << '\n';
    return summary;
}

}  // namespace plap
