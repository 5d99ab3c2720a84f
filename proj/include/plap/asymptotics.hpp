#pragma once

#include "plap/logistic.hpp"
#include "plap/mesh.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace plap {

struct SweepRecord {
    double q = 0.0;
    double M = 0.0;
    double log_M = 0.0;
    double log_gap = 0.0;       // (q-p+1) ln M - ln α
    double profile_dist = 0.0;  // ||u/M - U_α||_∞ (low) or ||u - w||_∞ (high)
    int iterations = 0;
    double residual = 0.0;
    std::string flag = "ok";  // "ok" or the error name when the solve failed
    Field u;                  // capped at 1e300
    Field profile;

    bool ok() const { return flag == "ok"; }
};

struct SweepResult {
    std::vector<SweepRecord> records;
    double alpha = 0.0;
    Field U_alpha;
    ExistenceWindow window;
    Field reference;  // high sweep only: free-boundary or VI solution
};

/// Warm-started solves along q decreasing to p-1. Throws PreconditionError
/// for a bad schedule or an a outside the existence window.
SweepResult sweep_q_low(GridPtr grid, const Field& b, double p, double a,
                        const std::vector<double>& schedule, double tol = 1e-8);

/// Warm-started solves along increasing q, compared with the free-boundary
/// solution (b > 0 everywhere) or with the VI solution (b vanishing on runs).
SweepResult sweep_q_high(GridPtr grid, const Field& b, double p, double a,
                         const std::vector<double>& schedule, double tol = 1e-8);

/// exp(∫ b U^p ln U / ∫ b U^k) by the trapezoidal rule, with U^p ln U = 0
/// where U = 0. k defaults to p.
double critical_constant_c(const Field& U1, const Field& b, double p, double denominator_exponent);
double critical_constant_c(const Field& U1, const Field& b, double p);

struct LimitEstimate {
    double value = 0.0;
    bool trend = false;  // monotone with shrinking increments
    double last_gap = 0.0;
};

/// Aitken Δ² on the last three valid records when they are monotone with
/// shrinking increments; otherwise the last value with trend = false.
/// Throws TooFewRecords with fewer than three valid records.
LimitEstimate extrapolate_limit(const std::vector<SweepRecord>& records,
                                const std::function<double(const SweepRecord&)>& selector);

/// Same on plain values.
LimitEstimate extrapolate_limit(const std::vector<double>& values);

/// Columns q,M,log_gap,profile_dist,iterations,residual,flag.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);

}  // namespace plap
