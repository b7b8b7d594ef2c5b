#ifndef ELDNN_CONFIG_HPP
#define ELDNN_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eldnn/inference.hpp"
#include "eldnn/network.hpp"
#include "eldnn/trainer.hpp"

namespace eldnn {

struct LayerSpec {
    std::size_t size = 0;
    Activation activation = Activation::kRelu;
    double keep_prob = 0.5; // mask probability on this layer's input
};

/// One experiment: architecture, training and inference settings, data
/// source. Parsed from flat `key = value` text under [section] headers.
struct ExperimentConfig {
    // [network]; the first layer's keep_prob masks the network input
    std::size_t input_dim = 0;
    std::vector<LayerSpec> layers;

    // [train]
    TrainConfig train;

    // [inference]
    InferenceConfig inference;

    // [data]
    std::string source = "synth"; // synth | idx
    int synth_classes = 4;
    int synth_dim = 16;
    int synth_per_class = 500;
    double synth_separation = 3.0;
    std::uint64_t data_seed = 0;
    std::string idx_images, idx_labels;
    std::string idx_test_images, idx_test_labels;
    std::size_t holdout = 0;

    // [sweep]
    std::vector<double> lambdas = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};

    // [output]
    std::string out_dir = "out";
};

/// Parse a config file. Errors name the offending line number.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Render the fully resolved config back out (every run embeds this in its
/// artifacts so a run is reconstructible from outputs alone).
std::string render_config(const ExperimentConfig& cfg);

Network build_network(const ExperimentConfig& cfg);

} // namespace eldnn

#endif
