#pragma once

#include "plap/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plap {

enum class Subcommand { eigen, solve, sweep_low, sweep_high, obstacle, vi, verify_all };

std::string to_string(Subcommand s);
/// Throws UnknownKey for a name outside the list.
Subcommand parse_subcommand(const std::string& name);

/// a given outright or relative to λ₁ of the interval ("lambda1+0.5", "lambda1*2").
struct GrowthRate {
    enum class Kind { absolute, lambda1_plus, lambda1_times };
    Kind kind = Kind::lambda1_plus;
    double value = 1.0;

    double resolve(double lambda1) const;
};

std::string to_string(const GrowthRate& a);

struct ExperimentConfig {
    Subcommand subcommand = Subcommand::eigen;
    double p = 2.0;
    GrowthRate a;
    double q = 2.0;  // solve only; must exceed p - 1 there
    /// "halving:<k>" (q = p-1 + 2^-1 .. 2^-k, the default for sweep-low),
    /// "doubling:<lo>:<hi>" (q = lo, 2lo, .. <= hi, default 4:64 for sweep-high)
    /// or an explicit comma list.
    std::string schedule;
    CoefficientDescriptor coef = ConstantCoefficient{1.0};
    double x_left = 0.0;
    double x_right = 1.0;
    std::optional<double> omega0_left;
    std::optional<double> omega0_right;
    int n_cells = 1024;
    double tol = 1e-8;
    std::string out = "plap_out";
    std::uint64_t seed = 1;
    bool emit_gnuplot = false;
    int k = 5;  // multistart runs for `obstacle`
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Flat "key = value" lines with '#' comments, then overrides on top
/// (hyphens in override keys read as underscores). Throws ParseError for
/// malformed lines, UnknownKey and RangeError.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});

/// Resolved q list for the sweep subcommands.
std::vector<double> schedule_values(const ExperimentConfig& cfg);

/// One "key = value" line per field in a fixed order; feeds the config hash.
std::string canonical_text(const ExperimentConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace plap
