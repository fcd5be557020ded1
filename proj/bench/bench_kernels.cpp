// Serial reference against OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "mbph/discretization.hpp"

using namespace mbph;

namespace {

struct Fixture {
    PHSystem sys = tl_system(1.0, 1.0);
    BoundsSample bounds = eval_bounds(BoundaryTrajectory::paper_benchmark(), 3.0);
    Mesh mesh;
    DiscreteState x;
    NodalEfforts e;
    DiscreteState dx;

    explicit Fixture(int N) : mesh(N), x(2, N), dx(2, N) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (Eigen::Index k = 0; k < x.data.size(); ++k) x.data(k) = u(rng);
        e = reconstruct_nodal_efforts(sys, mesh, x, {0, 0.1, 1, -0.2});
    }
};

void BM_rhs_serial(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        semi_discrete_rhs_serial(f.sys, f.bounds, f.mesh, f.x, f.e, f.dx);
        benchmark::DoNotOptimize(f.dx.data.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_rhs_parallel(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        semi_discrete_rhs_parallel(f.sys, f.bounds, f.mesh, f.x, f.e, f.dx);
        benchmark::DoNotOptimize(f.dx.data.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_dirac_serial(benchmark::State& state) {
    const PHSystem sys = tl_system(1.0, 1.0);
    const BoundsSample b = eval_bounds(BoundaryTrajectory::paper_benchmark(), 2.0);
    DiracCheck check;
    check.n_samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(verify_dirac_serial(sys, b, check).max_abs_pairing);
}

void BM_dirac_parallel(benchmark::State& state) {
    const PHSystem sys = tl_system(1.0, 1.0);
    const BoundsSample b = eval_bounds(BoundaryTrajectory::paper_benchmark(), 2.0);
    DiracCheck check;
    check.n_samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(verify_dirac(sys, b, check).max_abs_pairing);
}

} // namespace

BENCHMARK(BM_rhs_serial)->RangeMultiplier(16)->Range(64, 1 << 18);
BENCHMARK(BM_rhs_parallel)->RangeMultiplier(16)->Range(64, 1 << 18);
BENCHMARK(BM_dirac_serial)->Arg(100);
BENCHMARK(BM_dirac_parallel)->Arg(100);

BENCHMARK_MAIN();
