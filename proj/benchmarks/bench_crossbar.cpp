#include <benchmark/benchmark.h>

#include "dwmtj/clustering.hpp"
#include "dwmtj/crossbar.hpp"
#include "dwmtj/rng.hpp"

using namespace dwmtj;

namespace {

DeviceParams bench_params() {
    DeviceParams p;
    p.mobility_neuron = 0.003;
    return p;
}

CrossbarLayer random_layer(int n_in, int n_out) {
    CrossbarLayer layer = CrossbarLayer::create(n_in, n_out, bench_params());
    Rng rng(1234);
    for (auto& s : layer.synapses) s.position = rng.next_double();
    return layer;
}

InputPattern random_pattern(int n_in, double density) {
    Rng rng(99);
    InputPattern in;
    for (int j = 0; j < n_in; ++j) {
        in.voltages.push_back(rng.next_double() < density ? VoltageLevel::Vdd : VoltageLevel::Gnd);
    }
    return in;
}

} // namespace

static void BM_FeedforwardCurrents(benchmark::State& state) {
    const int n_in = static_cast<int>(state.range(0));
    const int n_out = static_cast<int>(state.range(1));
    CrossbarLayer layer = random_layer(n_in, n_out);
    const InputPattern in = random_pattern(n_in, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(feedforward_currents(layer, in));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n_in) * n_out);
}
BENCHMARK(BM_FeedforwardCurrents)->Args({784, 250})->Args({240, 160})->Args({64, 64});

static void BM_Present(benchmark::State& state) {
    CrossbarLayer layer = random_layer(784, 250);
    const InputPattern in = random_pattern(784, 0.2);
    for (auto _ : state) {
        reset_layer(layer);
        benchmark::DoNotOptimize(present(layer, in, WtaMode::Soft));
    }
}
BENCHMARK(BM_Present);

static void BM_ApplyFeedback(benchmark::State& state) {
    CrossbarLayer layer = random_layer(784, 250);
    const InputPattern in = random_pattern(784, 0.2);
    for (auto _ : state) {
        apply_feedback(layer, in, {17}, FeedbackScope::WinnersOnly);
    }
}
BENCHMARK(BM_ApplyFeedback);

static void BM_TrainUnsupervised(benchmark::State& state) {
    Dataset ds;
    ds.meta.n_inputs = 240;
    Rng rng(5);
    for (int i = 0; i < 64; ++i) {
        ds.patterns.push_back(random_pattern(240, 0.15 + 0.01 * (i % 10)));
    }
    ClusterConfig cfg;
    cfg.n_clusters = 80;
    cfg.wta_mode = WtaMode::Soft;
    cfg.unsupervised_samples = 256;
    cfg.seed = 7;
    for (auto _ : state) {
        CrossbarLayer layer = init_network(240, cfg, bench_params());
        train_unsupervised(layer, ds, cfg);
        benchmark::DoNotOptimize(layer.synapses.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.unsupervised_samples);
}
BENCHMARK(BM_TrainUnsupervised);

BENCHMARK_MAIN();
