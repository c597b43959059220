#include <benchmark/benchmark.h>

#include "gkae/adam.hpp"
#include "gkae/autodiff.hpp"
#include "gkae/baselines.hpp"
#include "gkae/datasets.hpp"
#include "gkae/gkae.hpp"
#include "gkae/rng.hpp"
#include "gkae/spectral.hpp"

using namespace gkae;

namespace {

GraphSnapshot random_weighted_graph(int n, std::uint64_t seed) {
    Rng rng(seed);
    GraphSnapshot g;
    g.signals.assign(n, 0.0);
    g.weights = Matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.4) {
                const double w = rng.uniform(0.2, 2.0);
                g.weights(i, j) = w;
                g.weights(j, i) = w;
                g.edges.emplace_back(i, j);
            }
    return g;
}

GraphSequence training_sequence(int nodes, int steps, std::uint64_t seed) {
    UavConfig cfg;
    cfg.nodes = nodes;
    cfg.steps = steps;
    cfg.seed = seed;
    DatasetBundle bundle = simulate_uav(cfg);
    split_and_normalize(bundle, steps / 2);
    return bundle.sequence;
}

}  // namespace

static void Eigendecompose(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix lap = laplacian(random_weighted_graph(n, 7));
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(lap));
    state.SetComplexityN(n);
}
BENCHMARK(Eigendecompose)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void GkaeLossEpoch(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    const GraphSequence seq = training_sequence(20, steps, 3);
    GkaeConfig cfg;
    cfg.output_dim = 20;
    GkaeModel model = GkaeModel::init(cfg, 1);
    std::vector<Matrix*> params = model.parameters();
    for (auto _ : state) {
        ad::Tape tape;
        ad::ParamSet bindings(true);
        ad::Tensor loss = build_gkae_loss(tape, bindings, model, seq, steps / 4);
        tape.backward(loss);
        benchmark::DoNotOptimize(bindings.gradient(*params.front()));
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(GkaeLossEpoch)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void TgsIterations(benchmark::State& state) {
    const GraphSequence seq = training_sequence(20, 100, 5);
    const SamplingMask mask = make_mask(20, 100, 60, 0.5, 11);
    const Matrix x = signals_matrix(seq);
    Matrix observed(20, 100);
    for (int t = 0; t < 100; ++t)
        for (int i = 0; i < 20; ++i) observed(i, t) = mask.is_observed(i, t) ? x(i, t) : 0.0;
    TgsConfig cfg;
    cfg.max_outer = 50;
    for (auto _ : state) benchmark::DoNotOptimize(tgs_reconstruct(seq, observed, mask, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.max_outer);
}
BENCHMARK(TgsIterations)->Unit(benchmark::kMillisecond);

static void UavSimulation(benchmark::State& state) {
    UavConfig cfg;
    cfg.steps = static_cast<int>(state.range(0));
    cfg.seed = 13;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_uav(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(UavSimulation)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
