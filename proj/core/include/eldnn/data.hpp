#ifndef ELDNN_DATA_HPP
#define ELDNN_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eldnn/tensor.hpp"

namespace eldnn {

struct Dataset {
    std::vector<Vector> inputs;
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t size() const { return inputs.size(); }
    std::size_t dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Load an IDX image/label pair (big-endian, magics 0x803 / 0x801). Pixels
/// are scaled by 1/255 into [0,1] and flattened row-major. Malformed input
/// raises FormatError naming the byte offset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Write a dataset back out as an IDX pair. Inputs must be grid values
/// k/255 (as produced by load_idx); each pixel is stored as round(v*255).
void save_idx(const Dataset& ds, std::size_t rows, std::size_t cols,
              const std::string& images_path, const std::string& labels_path);

/// k isotropic unit-variance Gaussian blobs, class c centered at
/// separation * e_{c mod d}. Raw draws are clipped to [-4, separation+4]
/// and min-max rescaled (globally) into [0,1]. Labels come in class blocks.
Dataset synth_gaussians(int k, int d, int n_per_class, double separation,
                        std::uint64_t seed);

/// Deterministic shuffled split into (train, validation) with exactly
/// `holdout` validation examples. Disjoint and exhaustive.
std::pair<Dataset, Dataset> split(const Dataset& ds, std::size_t holdout,
                                  std::uint64_t seed);

} // namespace eldnn

#endif
