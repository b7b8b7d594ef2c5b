#ifndef ELDNN_INFERENCE_HPP
#define ELDNN_INFERENCE_HPP

#include <cstddef>
#include <cstdint>

#include "eldnn/data.hpp"
#include "eldnn/network.hpp"

namespace eldnn {

enum class InferenceMode { kStandard, kMonteCarlo };

struct InferenceConfig {
    InferenceMode mode = InferenceMode::kStandard;
    std::size_t mc_samples = 100;
    std::uint64_t seed = 0;
};

/// Class distribution for one input. Standard mode is the deterministic
/// scaled pass and touches no RNG; Monte-Carlo mode averages mc_samples
/// stochastic passes (fresh masks from the per-example stream).
Vector predict(const Network& net, const Vector& x, const InferenceConfig& cfg,
               std::uint64_t example_index = 0);

/// Percentage of argmax misclassifications; ties go to the lowest class.
double error_rate(const Network& net, const Dataset& ds, const InferenceConfig& cfg);

/// Empirical expectation-linearization measure: mean over the dataset of
/// || mean_m h^(L)(x,s) - h^(L)(x,E[S]) ||_2 (unsquared), the MC mean taken
/// over mc_samples masks from a per-example derived stream.
double measure_gap(const Network& net, const Dataset& ds, std::size_t mc_samples,
                   std::uint64_t seed);

} // namespace eldnn

#endif
