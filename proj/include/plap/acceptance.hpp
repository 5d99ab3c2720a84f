#pragma once

#include "plap/asymptotics.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace plap {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// "PASS [ 3] title: detail (1.2 s)"
std::string format_result(const CriterionResult& r);

struct AcceptanceOptions {
    int n_cells = 1024;
    std::string out_dir;  // sweep CSVs are written here when non-empty
};

/// The thirteen numbered acceptance checks. Sweeps shared between checks are
/// computed once per suite.
class AcceptanceSuite {
public:
    static constexpr int kCount = 13;

    explicit AcceptanceSuite(AcceptanceOptions opts = {});

    /// Throws RangeError for an id outside 1..13. Solver errors inside a
    /// check turn into a FAIL with the message as detail.
    CriterionResult run(int id);
    std::vector<CriterionResult> run_all();

private:
    const SweepResult& low_sweep(double p, double a_offset);
    const SweepResult& vanishing_low_sweep(double p);
    const SweepResult& high_sweep();
    void dump(const std::string& name, const SweepResult& s) const;

    CriterionResult eigen_closed_forms();
    CriterionResult potential_shift();
    CriterionResult low_limit(int id, double a_offset);
    CriterionResult critical_constant();
    CriterionResult apriori_bound();
    CriterionResult free_boundary_limit();
    CriterionResult uniqueness();
    CriterionResult vanishing_curve();
    CriterionResult vanishing_low_limit();
    CriterionResult vi_construction();
    CriterionResult kernel_checks();
    CriterionResult monotonicity();

    AcceptanceOptions opts_;
    GridPtr grid_;
    std::map<std::string, SweepResult> sweeps_;
};

}  // namespace plap
