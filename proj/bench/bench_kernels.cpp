// Serial reference vs OpenMP versions of the two hot loops.
//   bench_kernels --benchmark_filter=Simulate

#include <memory>

#include <benchmark/benchmark.h>

#include "coverlab/harmonic_forms.hpp"
#include "coverlab/rbm.hpp"

using namespace coverlab;

namespace {

struct Fixture {
    PlanarDomain domain;
    std::shared_ptr<const Grid> grid;
    FormBasis basis;

    Fixture()
        : domain([] {
              DomainSpec s;
              s.outer = {{0, 0}, 5.0};
              s.holes = {{{-2, 0}, 1.0}, {{2, 0}, 1.0}};
              return build_domain(s);
          }()),
          grid(std::make_shared<const Grid>(domain, 0.05)),
          basis(dual_basis(domain, grid)) {}
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

SimConfig sim_config(int n) {
    SimConfig c;
    c.dt = 1e-3;
    c.T = 1.0;
    c.n_traj = n;
    return c;
}

void BM_SimulateSerial(benchmark::State& st) {
    const Fixture& f = fixture();
    SimConfig c = sim_config(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(simulate_serial(f.domain, f.basis, c));
    st.SetItemsProcessed(st.iterations() * st.range(0) * 1000);
}

void BM_SimulateParallel(benchmark::State& st) {
    const Fixture& f = fixture();
    SimConfig c = sim_config(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(simulate(f.domain, f.basis, c));
    st.SetItemsProcessed(st.iterations() * st.range(0) * 1000);
}

void BM_SigmaSerial(benchmark::State& st) {
    const Fixture& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(sigma_quadrature_serial(*f.grid, f.basis.forms));
}

void BM_SigmaParallel(benchmark::State& st) {
    const Fixture& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(sigma_quadrature(*f.grid, f.basis.forms));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SigmaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SigmaParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
