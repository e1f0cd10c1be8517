// Serial reference vs OpenMP kernels of the EA: population build and one generation.
#include <benchmark/benchmark.h>

#include "evop/ea.hpp"
#include "evop/instance_gen.hpp"

namespace {

const evop::Instance& instance() {
    static const evop::Instance inst = [] {
        evop::GenParams g;
        g.seed = 11;
        g.n_orders = 300;
        g.n_stations = 20;
        return evop::generate(g);
    }();
    return inst;
}

evop::EaParams params(bool parallel) {
    evop::EaParams p;
    p.population = 400;
    p.seed = 5;
    p.parallel = parallel;
    return p;
}

void BM_InitialPopulation(benchmark::State& state) {
    const auto p = params(state.range(0) != 0);
    for (auto _ : state) benchmark::DoNotOptimize(evop::initial_population(instance(), p));
}

void BM_Generation(benchmark::State& state) {
    const auto p = params(state.range(0) != 0);
    const auto pop = evop::initial_population(instance(), p);
    int gen = 0;
    for (auto _ : state) benchmark::DoNotOptimize(evop::next_generation(pop, instance(), p, ++gen));
}

}  // namespace

BENCHMARK(BM_InitialPopulation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Generation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
