#pragma once

#include "plap/config.hpp"

#include <exception>
#include <string>

namespace plap {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int checks_failed = 1;  // verify-all with a failing criterion
inline constexpr int nonexistence = 2;
inline constexpr int no_convergence = 3;
inline constexpr int config_error = 4;
}  // namespace exit_code

/// Exit status for an exception escaping a run.
int exit_code_for(const std::exception& e);

const char* version();

struct RunSummary {
    int exit_code = exit_code::ok;
    std::string out_dir;
    std::string report;  // also written to <out_dir>/report.txt
};

/// $PLAP_OUT when set, else cfg.out.
std::string output_directory(const ExperimentConfig& cfg);

/// Dispatches on cfg.subcommand and writes into the output directory:
/// field / sweep CSVs, report.txt, a row per solve in runlog.csv, one line in
/// manifest.txt and, with emit_gnuplot, plot.gp. Solver errors are caught and
/// mapped to an exit code; the report then names the error.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace plap
