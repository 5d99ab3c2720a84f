#include "plap/acceptance.hpp"
#include "plap/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Runs the numbered acceptance checks, one PASS/FAIL line each"};
    plap::AcceptanceOptions opts;
    std::vector<int> only;
    app.add_option("--n-cells,--n_cells", opts.n_cells, "grid cells")->check(CLI::Range(4, 1 << 20));
    app.add_option("--out", opts.out_dir, "directory for sweep CSVs");
    app.add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, plap::AcceptanceSuite::kCount));
    CLI11_PARSE(app, argc, argv);

    plap::AcceptanceSuite suite(opts);
    std::vector<plap::CriterionResult> results;
    if (only.empty()) {
        results = suite.run_all();
    } else {
        for (int id : only) results.push_back(suite.run(id));
    }
    int failed = 0;
    for (const auto& r : results) {
        std::cout << plap::format_result(r) << '\n';
        failed += r.pass ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
