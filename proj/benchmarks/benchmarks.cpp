#include <benchmark/benchmark.h>

#include "eldnn/network.hpp"
#include "eldnn/objective.hpp"
#include "eldnn/tensor.hpp"
#include "eldnn/theory.hpp"

namespace {

using namespace eldnn;

Network dense_net(std::initializer_list<std::size_t> dims, double input_keep,
                  double hidden_keep, std::uint64_t seed) {
    std::vector<DenseLayer> layers;
    auto it = dims.begin();
    std::size_t in = *it++;
    bool first = true;
    for (; it != dims.end(); ++it) {
        DenseLayer layer;
        layer.weights = Matrix(*it, in);
        layer.bias.assign(*it, 0.0);
        layer.activation =
            std::next(it) == dims.end() ? Activation::kSoftmax : Activation::kRelu;
        layer.keep_prob = first ? input_keep : hidden_keep;
        first = false;
        in = *it;
        layers.push_back(std::move(layer));
    }
    Network net(std::move(layers));
    RngStream rng(seed, streams::kInit);
    init_weights(net, rng);
    return net;
}

Vector random_input(std::size_t dim, std::uint64_t seed) {
    RngStream rng(seed, streams::kData);
    Vector x(dim);
    for (double& v : x) v = rng.next_double();
    return x;
}

void BM_ForwardDeterministic(benchmark::State& state) {
    const Network net = dense_net({784, 1024, 1024, 1024, 10}, 0.2, 0.5, 1);
    const Vector x = random_input(784, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(forward_deterministic(net, x).output().front());
}
BENCHMARK(BM_ForwardDeterministic);

void BM_ForwardStochastic(benchmark::State& state) {
    const Network net = dense_net({784, 1024, 1024, 1024, 10}, 0.2, 0.5, 1);
    const Vector x = random_input(784, 2);
    RngStream rng(3, streams::kMask);
    for (auto _ : state) {
        const MaskSample s = sample_mask(net, rng);
        benchmark::DoNotOptimize(forward_stochastic(net, x, s).output().front());
    }
}
BENCHMARK(BM_ForwardStochastic);

void BM_LossAndGrad(benchmark::State& state) {
    const auto batch_size = static_cast<std::size_t>(state.range(0));
    const Network net = dense_net({16, 64, 64, 4}, 0.8, 0.5, 4);
    Batch batch;
    std::vector<MaskSample> masks;
    RngStream rng(5, streams::kMask);
    for (std::size_t i = 0; i < batch_size; ++i) {
        batch.push_back({random_input(16, 10 + i), static_cast<int>(i % 4)});
        masks.push_back(sample_mask(net, rng));
    }
    for (auto _ : state) {
        auto [loss, grads] = loss_and_grad(net, batch, masks, 1.0);
        benchmark::DoNotOptimize(loss.total);
        benchmark::DoNotOptimize(grads.bias_grads.back().front());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}
BENCHMARK(BM_LossAndGrad)->Arg(1)->Arg(16)->Arg(64);

void BM_EnumerateExpectation(benchmark::State& state) {
    // dropout unit count is the enumeration exponent
    const auto width = static_cast<std::size_t>(state.range(0));
    const Network net = dense_net({width, width, 3}, 0.5, 0.5, 6);
    const Vector x = random_input(width, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_expectation(net, x).front());
    state.SetComplexityN(static_cast<std::int64_t>(2 * width));
}
BENCHMARK(BM_EnumerateExpectation)->Arg(4)->Arg(6)->Arg(8)->Arg(10);

void BM_SpectralNorm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RngStream rng(8, 0);
    Matrix m(n, n);
    for (double& v : m.data) v = rng.next_uniform(-1, 1);
    // large iid matrices have a nearly degenerate top spectrum; give the
    // iteration room instead of the default budget
    for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(m, 1e-6, 50000));
}
BENCHMARK(BM_SpectralNorm)->Arg(64)->Arg(256)->Arg(1024);

void BM_MeasureLayerDeltaExact(benchmark::State& state) {
    const Network net = dense_net({6, 6, 3}, 0.5, 0.5, 9);
    Dataset ds;
    ds.num_classes = 3;
    for (int i = 0; i < 4; ++i) {
        ds.inputs.push_back(random_input(6, 20 + i));
        ds.labels.push_back(i % 3);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(
            measure_layer_delta_exact(net, 1, ds, LayerInputPath::kStochastic));
}
BENCHMARK(BM_MeasureLayerDeltaExact);

} // namespace
