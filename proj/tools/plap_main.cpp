#include "plap/config.hpp"
#include "plap/errors.hpp"
#include "plap/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

namespace {

constexpr const char* kKeys[] = {"p", "a", "q", "schedule", "coef", "x_left", "x_right",
                                 "omega0_left", "omega0_right", "n_cells", "tol", "out", "seed", "k"};

struct Flags {
    std::string config_path;
    std::map<std::string, std::optional<std::string>> values;
    bool emit_gnuplot = false;
};

void add_flags(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config_path, "flat key = value file")->check(CLI::ExistingFile);
    for (const char* key : kKeys) {
        std::string names = std::string("--") + key;
        std::string dashed = key;
        for (char& ch : dashed)
            if (ch == '_') ch = '-';
        if (dashed != key) names += ",--" + dashed;
        app.add_option(names, f.values[key], std::string("overrides config key ") + key);
    }
    app.add_flag("--emit-gnuplot,--emit_gnuplot", f.emit_gnuplot, "also write plot.gp");
}

std::string slurp(const std::string& path) {
    if (path.empty()) return "";
    std::ifstream is(path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-Laplacian logistic and free-boundary experiments"};
    app.set_version_flag("--version", plap::version());
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char*, const char*> subcommands[] = {
        {"eigen", "principal eigenpair, checked against the closed form"},
        {"solve", "positive solution of the logistic problem"},
        {"sweep-low", "q -> p-1 sweep with the limit estimates"},
        {"sweep-high", "q -> infinity sweep against the free boundary"},
        {"obstacle", "free-boundary problem with multistart"},
        {"vi", "variational inequality with an unconstrained subinterval"},
        {"verify-all", "run the acceptance checks"},
    };
    for (const auto& [name, help] : subcommands) add_flags(*app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : plap::exit_code::config_error;
    }

    try {
        plap::Overrides overrides;
        for (const auto& [key, value] : flags.values)
            if (value) overrides.emplace_back(key, *value);
        if (flags.emit_gnuplot) overrides.emplace_back("emit_gnuplot", "true");
        overrides.emplace_back("subcommand", app.get_subcommands().front()->get_name());
        const auto cfg = plap::parse_config(slurp(flags.config_path), overrides);
        const auto summary = plap::run_experiment(cfg);
        std::cout << summary.report;
        return summary.exit_code;
    } catch (const plap::Error& e) {
        std::cerr << "plap: " << e.what() << '\n';
        return plap::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "plap: " << e.what() << '\n';
        return plap::exit_code::no_convergence;
    }
}
