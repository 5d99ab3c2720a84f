#include "plap/kernels.hpp"
#include "plap/mesh.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace {

struct Data {
    plap::GridPtr grid;
    std::vector<double> u, b, out;

    explicit Data(int n_cells) : grid(plap::build_grid(0.0, 1.0, n_cells)) {
        const auto n = grid->size();
        u.resize(n);
        b.assign(n, 1.0);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(std::numbers::pi * grid->node(i));
    }
};

const plap::PLapParams kParams{3.0, 1e-4, 20.0, 4.0};

plap::Exec exec_of(const benchmark::State& st) {
    return st.range(1) ? plap::Exec::parallel : plap::Exec::serial;
}

void BM_residual(benchmark::State& st) {
    Data d(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        plap::kernel::residual_logistic(d.u, d.b, d.grid->h(), kParams, d.out, exec_of(st));
        benchmark::DoNotOptimize(d.out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_linearize(benchmark::State& st) {
    Data d(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        auto J = plap::kernel::linearize(d.u, d.b, d.grid->h(), kParams, exec_of(st));
        benchmark::DoNotOptimize(J.diag.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_energy(benchmark::State& st) {
    Data d(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(plap::kernel::p_energy(d.u, d.grid->h(), kParams.p, kParams.eps, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

// second argument: 0 = serial reference, 1 = OpenMP
#define PLAP_SIZES ArgsProduct({{1 << 10, 1 << 14, 1 << 18, 1 << 21}, {0, 1}})
BENCHMARK(BM_residual)->PLAP_SIZES;
BENCHMARK(BM_linearize)->PLAP_SIZES;
BENCHMARK(BM_energy)->PLAP_SIZES;

}  // namespace

BENCHMARK_MAIN();
