#include "eldnn/inference.hpp"

#include <cmath>
#include <string>

#include "eldnn/errors.hpp"
#include "eldnn/rng.hpp"

namespace eldnn {

Vector predict(const Network& net, const Vector& x, const InferenceConfig& cfg,
               std::uint64_t example_index) {
    if (!net.has_softmax_output())
        throw DomainError("predict: needs a softmax output layer");
    if (cfg.mode == InferenceMode::kStandard)
        return forward_deterministic(net, x).output();

    if (cfg.mc_samples < 1) throw DomainError("predict: mc_samples must be >= 1");
    RngStream rng(cfg.seed, streams::per_example(streams::kPredict, example_index));
    Vector mean(net.output_dim(), 0.0);
    for (std::size_t m = 0; m < cfg.mc_samples; ++m) {
        const MaskSample s = sample_mask(net, rng);
        axpy(1.0, forward_stochastic(net, x, s).output(), mean);
    }
    const double inv = 1.0 / static_cast<double>(cfg.mc_samples);
    for (double& v : mean) v *= inv;
    return mean;
}

double error_rate(const Network& net, const Dataset& ds, const InferenceConfig& cfg) {
    if (ds.size() == 0) throw DomainError("error_rate: empty dataset");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Vector p = predict(net, ds.inputs[i], cfg, i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.size(); ++c)
            if (p[c] > p[best]) best = c; // ties keep the lowest index
        if (static_cast<int>(best) != ds.labels[i]) ++wrong;
    }
    return 100.0 * static_cast<double>(wrong) / static_cast<double>(ds.size());
}

double measure_gap(const Network& net, const Dataset& ds, std::size_t mc_samples,
                   std::uint64_t seed) {
    if (ds.size() == 0) throw DomainError("measure_gap: empty dataset");
    if (mc_samples < 2) throw DomainError("measure_gap: mc_samples must be >= 2");
    double acc = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        RngStream rng(seed, streams::per_example(streams::kGap, i));
        Vector mean(net.output_dim(), 0.0);
        for (std::size_t m = 0; m < mc_samples; ++m) {
            const MaskSample s = sample_mask(net, rng);
            axpy(1.0, forward_stochastic(net, ds.inputs[i], s).output(), mean);
        }
        const double inv = 1.0 / static_cast<double>(mc_samples);
        for (double& v : mean) v *= inv;
        acc += norm2(sub(mean, forward_deterministic(net, ds.inputs[i]).output()));
    }
    return acc / static_cast<double>(ds.size());
}

} // namespace eldnn
