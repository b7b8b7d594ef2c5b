#include "eldnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "eldnn/errors.hpp"
#include "eldnn/rng.hpp"

namespace eldnn {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803; // IDX3, unsigned byte
constexpr std::uint32_t kLabelMagic = 0x00000801; // IDX1, unsigned byte

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path, std::size_t offset) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError(path + ": truncated at byte offset " + std::to_string(offset));
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>((v >> 24) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>(v & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw FormatError("cannot open image file '" + images_path + "'");
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw FormatError("cannot open label file '" + labels_path + "'");

    const std::uint32_t image_magic = read_u32_be(images, images_path, 0);
    if (image_magic != kImageMagic)
        throw FormatError(images_path + ": bad magic " + std::to_string(image_magic) +
                          " at byte offset 0 (want 2051)");
    const std::uint32_t n_images = read_u32_be(images, images_path, 4);
    const std::uint32_t rows = read_u32_be(images, images_path, 8);
    const std::uint32_t cols = read_u32_be(images, images_path, 12);

    const std::uint32_t label_magic = read_u32_be(labels, labels_path, 0);
    if (label_magic != kLabelMagic)
        throw FormatError(labels_path + ": bad magic " + std::to_string(label_magic) +
                          " at byte offset 0 (want 2049)");
    const std::uint32_t n_labels = read_u32_be(labels, labels_path, 4);
    if (n_images != n_labels)
        throw FormatError(images_path + ": image count " + std::to_string(n_images) +
                          " does not match label count " + std::to_string(n_labels));

    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    Dataset ds;
    ds.inputs.reserve(n_images);
    ds.labels.reserve(n_images);
    std::vector<unsigned char> pixel_buf(dim);
    int max_label = -1;
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!images.read(reinterpret_cast<char*>(pixel_buf.data()),
                         static_cast<std::streamsize>(dim)))
            throw FormatError(images_path + ": truncated at byte offset " +
                              std::to_string(16 + static_cast<std::size_t>(i) * dim));
        Vector x(dim);
        for (std::size_t p = 0; p < dim; ++p) x[p] = static_cast<double>(pixel_buf[p]) / 255.0;
        unsigned char label;
        if (!labels.read(reinterpret_cast<char*>(&label), 1))
            throw FormatError(labels_path + ": truncated at byte offset " +
                              std::to_string(8 + i));
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(static_cast<int>(label));
        max_label = std::max(max_label, static_cast<int>(label));
    }
    ds.num_classes = max_label + 1;
    return ds;
}

void save_idx(const Dataset& ds, std::size_t rows, std::size_t cols,
              const std::string& images_path, const std::string& labels_path) {
    if (rows * cols != ds.dim())
        throw DimensionError("save_idx: rows*cols != input dim");
    std::ofstream images(images_path, std::ios::binary);
    if (!images) throw FormatError("cannot open '" + images_path + "' for writing");
    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) throw FormatError("cannot open '" + labels_path + "' for writing");

    write_u32_be(images, kImageMagic);
    write_u32_be(images, static_cast<std::uint32_t>(ds.size()));
    write_u32_be(images, static_cast<std::uint32_t>(rows));
    write_u32_be(images, static_cast<std::uint32_t>(cols));
    write_u32_be(labels, kLabelMagic);
    write_u32_be(labels, static_cast<std::uint32_t>(ds.size()));

    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.inputs[i]) {
            const auto byte = static_cast<unsigned char>(std::lround(v * 255.0));
            images.write(reinterpret_cast<const char*>(&byte), 1);
        }
        const auto label = static_cast<unsigned char>(ds.labels[i]);
        labels.write(reinterpret_cast<const char*>(&label), 1);
    }
    if (!images || !labels) throw FormatError("short write saving IDX pair");
}

Dataset synth_gaussians(int k, int d, int n_per_class, double separation,
                        std::uint64_t seed) {
    if (k < 2) throw DomainError("synth_gaussians: need k >= 2 classes");
    if (d < 1) throw DomainError("synth_gaussians: need d >= 1 dimensions");
    if (n_per_class < 1) throw DomainError("synth_gaussians: need n_per_class >= 1");

    RngStream rng(seed, streams::kData);
    Dataset ds;
    ds.num_classes = k;
    ds.inputs.reserve(static_cast<std::size_t>(k) * n_per_class);
    ds.labels.reserve(static_cast<std::size_t>(k) * n_per_class);

    const double lo = -4.0;
    const double hi = separation + 4.0;
    for (int c = 0; c < k; ++c) {
        const int axis = c % d;
        for (int i = 0; i < n_per_class; ++i) {
            Vector x(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) {
                const double mean = j == axis ? separation : 0.0;
                x[static_cast<std::size_t>(j)] =
                    std::clamp(mean + rng.next_normal(), lo, hi);
            }
            ds.inputs.push_back(std::move(x));
            ds.labels.push_back(c);
        }
    }
    // Global min-max rescale into [0,1]; affine, so class geometry survives.
    double mn = hi, mx = lo;
    for (const Vector& x : ds.inputs)
        for (double v : x) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    const double span = mx > mn ? mx - mn : 1.0;
    for (Vector& x : ds.inputs)
        for (double& v : x) v = (v - mn) / span;
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, std::size_t holdout,
                                  std::uint64_t seed) {
    if (holdout >= ds.size())
        throw DomainError("split: holdout " + std::to_string(holdout) +
                          " >= dataset size " + std::to_string(ds.size()));
    RngStream rng(seed, streams::kShuffle);
    const std::vector<std::size_t> perm = rng.permutation(ds.size());

    Dataset val, train;
    val.num_classes = train.num_classes = ds.num_classes;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        Dataset& target = i < holdout ? val : train;
        target.inputs.push_back(ds.inputs[perm[i]]);
        target.labels.push_back(ds.labels[perm[i]]);
    }
    return {std::move(train), std::move(val)};
}

} // namespace eldnn
