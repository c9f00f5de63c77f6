// OpenMP kernels against the serial reference. Run with
// --benchmark_filter=BuildUn or =Estimate to pick a family.
#include "phtree/game.hpp"
#include "phtree/reference.hpp"
#include "phtree/solver.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace phtree;

namespace {

const GameParams kParams(3, 0.5, 0.5);

void BM_BuildUn_Parallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_un(BoundarySpec::quadratic_centered(), kParams, n).root());
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(level_size(3, n)));
}

void BM_BuildUn_Reference(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::build_un(BoundarySpec::quadratic_centered(), kParams, n).root());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(level_size(3, n)));
}

struct Players {
    std::shared_ptr<const LevelField> advice =
        std::make_shared<LevelField>(build_un(BoundarySpec::linear(), kParams, 8));
    Strategy one = Strategy::greedy_max(advice);
    Strategy two = Strategy::greedy_min(advice);
};

void BM_Estimate_Parallel(benchmark::State& state) {
    static const Players players;
    const auto plays = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            estimate_value(Vertex(3), players.one, players.two, BoundarySpec::linear(), kParams, 20, plays, 1).mean);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Estimate_Reference(benchmark::State& state) {
    static const Players players;
    const auto plays = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::estimate_value(Vertex(3), players.one, players.two, BoundarySpec::linear(),
                                                           kParams, 20, plays, 1)
                                     .mean);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_BuildUn_Parallel)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildUn_Reference)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimate_Parallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimate_Reference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
