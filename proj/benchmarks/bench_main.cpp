#include <benchmark/benchmark.h>

#include <vector>

#include "evoblock/block_operator.hpp"
#include "evoblock/centrality.hpp"
#include "evoblock/commands.hpp"
#include "evoblock/generators.hpp"

using namespace evoblock;

namespace {

TemporalNetwork pref_net(benchmark::State& state) {
    return gen_pref_sequence(static_cast<Index>(state.range(0)), 4, static_cast<std::size_t>(state.range(1)), 7);
}

void BM_Spmv(benchmark::State& state) {
    const auto a = gen_pref(static_cast<Index>(state.range(0)), 4, 7);
    std::vector<double> x(static_cast<std::size_t>(a.cols()), 1.0), y(static_cast<std::size_t>(a.rows()));
    for (auto _ : state) {
        spmv(a, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Spmv)->RangeMultiplier(4)->Range(256, 16384);

void BM_BlockApply(benchmark::State& state) {
    const auto net = pref_net(state);
    const BlockOperator op(net, resolve_a(net, 0.9), decay_betas(net, 1.0));
    std::vector<double> x(op.size(), 1.0), y(op.size());
    for (auto _ : state) {
        op.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_BlockApply)->Args({1000, 10})->Args({4000, 10})->Args({1000, 40});

void BM_Splitting(benchmark::State& state) {
    const auto net = pref_net(state);
    const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
    for (auto _ : state)
        benchmark::DoNotOptimize(running_scores_block(net, p, 0, Direction::Broadcast, Backend::Splitting));
}
BENCHMARK(BM_Splitting)->Args({200, 10})->Args({400, 10})->Args({800, 10})->Unit(benchmark::kMillisecond);

void BM_Recursion(benchmark::State& state) {
    const auto net = pref_net(state);
    const CentralityParams p{resolve_a(net, 0.9), 1.0, false};
    for (auto _ : state)
        benchmark::DoNotOptimize(running_scores_block(net, p, 0, Direction::Broadcast, Backend::Recursion));
}
BENCHMARK(BM_Recursion)->Args({200, 10})->Args({400, 10})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
