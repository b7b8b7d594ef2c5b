#ifndef ELDNN_TESTS_TINY_NETS_HPP
#define ELDNN_TESTS_TINY_NETS_HPP

// Shared generators for enumerable test networks and small datasets.

#include <cstdint>
#include <vector>

#include "eldnn/data.hpp"
#include "eldnn/network.hpp"
#include "eldnn/rng.hpp"

namespace eldnn_tests {

struct TinyNetSpec {
    std::vector<eldnn::Activation> hidden_pool = {eldnn::Activation::kSigmoid,
                                                  eldnn::Activation::kTanh};
    eldnn::Activation output = eldnn::Activation::kSoftmax;
    std::size_t min_depth = 2, max_depth = 3;
    std::size_t min_width = 2, max_width = 3;
    double weight_scale = 1.5;
    bool mask_all_layers = true;
};

/// Random enumerable network; every dimension stays within the 2^24 cap by a
/// wide margin.
inline eldnn::Network make_tiny_net(eldnn::RngStream& rng, const TinyNetSpec& spec = {}) {
    using namespace eldnn;
    const std::size_t depth =
        spec.min_depth + rng.next_below(static_cast<std::uint32_t>(
                             spec.max_depth - spec.min_depth + 1));
    std::vector<DenseLayer> layers;
    std::size_t in_dim = spec.min_width + rng.next_below(static_cast<std::uint32_t>(
                                              spec.max_width - spec.min_width + 1));
    for (std::size_t l = 0; l < depth; ++l) {
        const bool last = l + 1 == depth;
        DenseLayer layer;
        const std::size_t out_dim =
            spec.min_width +
            rng.next_below(static_cast<std::uint32_t>(spec.max_width - spec.min_width + 1));
        layer.weights = Matrix(out_dim, in_dim);
        for (double& w : layer.weights.data)
            w = rng.next_uniform(-spec.weight_scale, spec.weight_scale);
        layer.bias.resize(out_dim);
        for (double& b : layer.bias) b = rng.next_uniform(-0.5, 0.5);
        layer.activation =
            last ? spec.output
                 : spec.hidden_pool[rng.next_below(
                       static_cast<std::uint32_t>(spec.hidden_pool.size()))];
        layer.keep_prob =
            spec.mask_all_layers || l == 0 ? 0.5 + 0.1 * rng.next_below(5) : 1.0;
        in_dim = out_dim;
        layers.push_back(std::move(layer));
    }
    return Network(std::move(layers));
}

inline eldnn::Dataset make_tiny_dataset(eldnn::RngStream& rng, std::size_t n,
                                        std::size_t dim, int classes) {
    eldnn::Dataset ds;
    ds.num_classes = classes;
    for (std::size_t i = 0; i < n; ++i) {
        eldnn::Vector x(dim);
        for (double& v : x) v = rng.next_double();
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(
            static_cast<int>(rng.next_below(static_cast<std::uint32_t>(classes))));
    }
    return ds;
}

/// Single-layer, single-unit sigmoid net: w, b, keep as given. The worked
/// examples in the unit tests are all built from this.
inline eldnn::Network one_unit_sigmoid(double w, double b, double keep) {
    eldnn::DenseLayer layer;
    layer.weights = eldnn::Matrix(1, 1);
    layer.weights(0, 0) = w;
    layer.bias = {b};
    layer.activation = eldnn::Activation::kSigmoid;
    layer.keep_prob = keep;
    return eldnn::Network({layer});
}

} // namespace eldnn_tests

#endif
