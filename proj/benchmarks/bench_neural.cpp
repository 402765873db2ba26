#include <benchmark/benchmark.h>

#include "gtd/neural.hpp"
#include "gtd/rng.hpp"

namespace {

using namespace gtd;

NeuralConfig bench_config() {
    NeuralConfig cfg;
    cfg.vocab_size = 5000;
    cfg.embed_dim = 64;
    cfg.max_seq_len = 128;
    cfg.lstm_hidden = 64;
    cfg.transformer.layers = 2;
    cfg.transformer.heads = 2;
    cfg.transformer.ff_dim = 128;
    return cfg;
}

std::vector<std::uint32_t> bench_ids(const NeuralConfig& cfg, std::size_t true_len) {
    Rng rng(3);
    std::vector<std::uint32_t> ids(cfg.max_seq_len, 0);
    for (std::size_t t = 0; t < true_len; ++t)
        ids[t] = 2 + static_cast<std::uint32_t>(rng.below(cfg.vocab_size - 2));
    return ids;
}

void BM_LstmForward(benchmark::State& state) {
    const NeuralConfig cfg = bench_config();
    TextClassifierNet net(ArchitectureVariant::Lstm, cfg);
    net.init_params(1);
    const auto ids = bench_ids(cfg, 40);
    for (auto _ : state) benchmark::DoNotOptimize(net.predict_logit(ids));
}
BENCHMARK(BM_LstmForward);

void BM_TransformerForward(benchmark::State& state) {
    const NeuralConfig cfg = bench_config();
    TextClassifierNet net(ArchitectureVariant::Transformer, cfg);
    net.init_params(1);
    const auto ids = bench_ids(cfg, 40);
    for (auto _ : state) benchmark::DoNotOptimize(net.predict_logit(ids));
}
BENCHMARK(BM_TransformerForward);

void BM_TransformerCnnTrainStep(benchmark::State& state) {
    NeuralConfig cfg = bench_config();
    cfg.max_seq_len = 64;
    TextClassifierNet net(ArchitectureVariant::TransformerCnn, cfg);
    net.init_params(1);
    const auto ids = bench_ids(cfg, 40);
    TextClassifierNet::Cache cache;
    for (auto _ : state) {
        const double z = net.forward(ids, cache);
        net.backward(logistic(z) - 1.0, cache);
        net.zero_grads();
    }
}
BENCHMARK(BM_TransformerCnnTrainStep);

} // namespace

BENCHMARK_MAIN();
