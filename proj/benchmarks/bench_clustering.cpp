#include <benchmark/benchmark.h>

#include "hpforge/clustering.hpp"
#include "hpforge/evaluation.hpp"

namespace {

std::vector<hpforge::FeatureVector> planted_vectors(int true_k, int hosts_per_cluster) {
    const auto network =
        hpforge::generate_planted(true_k, hosts_per_cluster, 10, 16, /*seed=*/1);
    const auto schema = hpforge::build_schema(network.inventory);
    return hpforge::vectorize(network.inventory, schema);
}

void BM_Distance(benchmark::State& state) {
    const auto vectors = planted_vectors(5, 10);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& a = vectors[i % vectors.size()];
        const auto& b = vectors[(i * 7 + 3) % vectors.size()];
        benchmark::DoNotOptimize(hpforge::distance(a, b));
        ++i;
    }
}
BENCHMARK(BM_Distance);

void BM_KmeansOnce(benchmark::State& state) {
    const auto vectors = planted_vectors(5, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const auto clustering = hpforge::kmeans_once(vectors, 5, /*seed=*/7);
        benchmark::DoNotOptimize(clustering.total_variance);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KmeansOnce)->Arg(10)->Arg(40)->Arg(160)->Complexity();

void BM_SelectK(benchmark::State& state) {
    const auto vectors = planted_vectors(5, 10);
    for (auto _ : state) {
        const auto selection = hpforge::select_k(vectors, 0.68, static_cast<int>(state.range(0)),
                                                 20, /*seed=*/7);
        benchmark::DoNotOptimize(selection.trace.chosen_k);
    }
}
BENCHMARK(BM_SelectK)->Arg(1)->Arg(15);

}  // namespace

BENCHMARK_MAIN();
