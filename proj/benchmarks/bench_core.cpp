#include <benchmark/benchmark.h>

#include <cmath>

#include "erspec/graph.hpp"
#include "erspec/local_law.hpp"
#include "erspec/pruning.hpp"
#include "erspec/spectra.hpp"

using namespace erspec;

static void BM_GenerateER(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    double d = 0.6 * std::log(double(n));
    uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(generate_er(n, d, seed++).edge_count);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * d / 2));
}
BENCHMARK(BM_GenerateER)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_LanczosExtremal(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    GraphSample g = generate_er(n, 0.6 * std::log(double(n)), 7);
    ScaledMatrix a = build_scaled_matrix(g, MatrixKind::adjacency_over_sqrt_d);
    for (auto _ : state) benchmark::DoNotOptimize(eig_extremal(as_operator(a), 10).values.data());
}
BENCHMARK(BM_LanczosExtremal)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_Prune(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    GraphSample g = generate_er(n, 0.6 * std::log(double(n)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(prune(g, 1.5, 1).removed_edges.size());
}
BENCHMARK(BM_Prune)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_GreenFunction(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    GraphSample g = generate_er(n, 10.0, 5);
    Eigen::MatrixXd m = build_scaled_matrix(g, MatrixKind::adjacency_over_sqrt_d).dense();
    for (auto _ : state) benchmark::DoNotOptimize(green_function(m, cplx(1.0, 0.05), false).diag.data());
}
BENCHMARK(BM_GreenFunction)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
